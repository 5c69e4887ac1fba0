#include <doctest.h>

#include <cmath>

#include "memlb/errors.hpp"
#include "memlb/instance.hpp"
#include "support.hpp"

using namespace memlb;
using memlb::testing::naive_eval;
using memlb::testing::random_ball_point;

TEST_CASE("desk profile defaults") {
  const Params p = derive_params(32, 0.5, Profile::DeskScale);
  const double d = 32.0;
  CHECK(p.l_scale == d * d * d);
  CHECK(p.gamma == doctest::Approx(25.0 / std::pow(d, 0.125)));
  CHECK(p.s_corr == doctest::Approx(d * (p.gamma / 4) * (p.gamma / 4)));
  CHECK(std::sqrt(p.s_corr / d) == doctest::Approx(p.gamma / 4));
  CHECK(p.xi == doctest::Approx(2.0 / p.l_scale));
  CHECK(p.xi_prime == doctest::Approx(std::sqrt(d) * p.xi));
  CHECK(p.eps == doctest::Approx(1.0 / (d * d * p.l_scale)));
  CHECK(p.n_terms == 2);  // d^{1/12}/5⁴ rounds to 0, clamped
  CHECK(p.k_msg == 6);    // round(√32)
  CHECK(p.evaluable());
}

TEST_CASE("paper profile keeps ln L instead of L") {
  const Params p = derive_params(64, 0.5, Profile::Paper);
  CHECK(p.log_l_scale == doctest::Approx(std::pow(6.0, 5)));
  CHECK_FALSE(p.evaluable());
  CHECK_THROWS_AS(sample_instance(p, 1), OverrideViolatesInvariant);
}

TEST_CASE("parameter errors") {
  CHECK_THROWS_AS(derive_params(31, 0.5, Profile::DeskScale), NonEvenDimension);
  CHECK_THROWS_AS(derive_params(2, 0.5, Profile::DeskScale), NonEvenDimension);
  CHECK_THROWS_AS(derive_params(32, 0.0, Profile::DeskScale), DeltaOutOfRange);
  CHECK_THROWS_AS(derive_params(32, 1.5, Profile::DeskScale), DeltaOutOfRange);
  CHECK_NOTHROW(derive_params(32, 1.0, Profile::DeskScale));
  DeskScaleOverrides bad;
  bad.n_terms = 1;
  CHECK_THROWS_AS(derive_params(32, 0.5, Profile::DeskScale, bad), OverrideViolatesInvariant);
  DeskScaleOverrides neg;
  neg.gamma = -1.0;
  CHECK_THROWS_AS(derive_params(32, 0.5, Profile::DeskScale, neg), OverrideViolatesInvariant);
}

TEST_CASE("sampling is deterministic and well formed") {
  const Params p = derive_params(16, 0.5, Profile::DeskScale);
  const HardInstance a = sample_instance(p, 42);
  const HardInstance b = sample_instance(p, 42);
  const HardInstance c = sample_instance(p, 43);
  CHECK(a.a == b.a);
  CHECK(a.nemirovski == b.nemirovski);
  CHECK(a.digest() == b.digest());
  CHECK(a.digest() != c.digest());
  CHECK(a.a.rows() == 8);
  CHECK(a.a.cols() == 16);
  CHECK(a.nemirovski.rows() == p.n_terms);
  CHECK(a.a.cwiseAbs().isApproxToConstant(1.0));
  CHECK(a.nemirovski.cwiseAbs().isApproxToConstant(0.25));
}

TEST_CASE("eval_f against a plain rescan") {
  std::mt19937_64 gen(11);
  for (int d : {8, 16, 32}) {
    DeskScaleOverrides ov;
    ov.gamma = 0.3;
    ov.n_terms = 4;
    const Params p = derive_params(d, 0.5, Profile::DeskScale, ov);
    const HardInstance inst = sample_instance(p, static_cast<std::uint64_t>(d));
    for (int t = 0; t < 300; ++t) {
      Vector x = random_ball_point(d, gen);
      if (t % 3 == 0) x *= 1e-4;  // near the origin the Nemirovski terms compete
      const EvalResult r = eval_f(inst, x, true);
      const auto n = naive_eval(inst, x);
      CHECK(r.value == doctest::Approx(n.value).epsilon(1e-12));
      CHECK(r.raw_terms->size() == 2 * inst.n_rows_a() + inst.n_terms());
    }
  }
}

TEST_CASE("rows win ties at the origin") {
  DeskScaleOverrides ov;
  ov.gamma = 1.0;  // L·0 − 1 = −1 = ⟨v₁,0⟩ − γ
  const Params p = derive_params(8, 0.5, Profile::DeskScale, ov);
  const HardInstance inst = sample_instance(p, 5);
  const EvalResult r = eval_f(inst, Vector::Zero(8));
  CHECK(r.achieving_term == Term::row(1, 1));
  CHECK(r.value == doctest::Approx(-1.0 / (std::sqrt(8.0) * p.l_scale)));

  DeskScaleOverrides small;
  small.gamma = 0.5;
  const HardInstance nem = sample_instance(derive_params(8, 0.5, Profile::DeskScale, small), 5);
  CHECK(eval_f(nem, Vector::Zero(8)).achieving_term == Term::nem(1));
}

TEST_CASE("norm guard") {
  const HardInstance inst = sample_instance(derive_params(8, 0.5, Profile::DeskScale), 1);
  Vector x = Vector::Zero(8);
  x[0] = 1.0 + 1e-9;
  CHECK_THROWS_AS(eval_f(inst, x), NormTooLarge);
  x[0] = 1.0;
  CHECK_NOTHROW(eval_f(inst, x));
}

TEST_CASE("Lipschitz and convexity on random pairs and triples") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u01;
  for (int d : {8, 32}) {
    DeskScaleOverrides ov;
    ov.gamma = 0.3;
    const HardInstance inst = sample_instance(derive_params(d, 0.5, Profile::DeskScale, ov), 9);
    std::size_t bad = 0;
    for (int t = 0; t < 2000; ++t) {
      const Vector x = random_ball_point(d, gen);
      const Vector y = random_ball_point(d, gen);
      const double fx = eval_f(inst, x).value;
      const double fy = eval_f(inst, y).value;
      if (std::abs(fx - fy) > (x - y).norm() + 1e-9) ++bad;
      const double lam = u01(gen);
      const double fm = eval_f(inst, lam * x + (1 - lam) * y).value;
      if (fm > lam * fx + (1 - lam) * fy + 1e-9) ++bad;
    }
    CHECK(bad == 0);
  }
}

TEST_CASE("term text round trip") {
  for (const Term& t : {Term::row(3, -1), Term::row(1, 1), Term::nem(2)}) {
    CHECK(Term::parse(t.to_string()) == t);
  }
  CHECK_THROWS(Term::parse("garbage"));
}

TEST_CASE("with_nemirovski replaces one vector") {
  const HardInstance inst = sample_instance(derive_params(8, 0.5, Profile::DeskScale), 2);
  Vector v = Vector::Constant(8, 1.0 / std::sqrt(8.0));
  const HardInstance mod = with_nemirovski(inst, 2, v);
  CHECK(mod.nemirovski.row(1).transpose() == v);
  CHECK(mod.nemirovski.row(0) == inst.nemirovski.row(0));
  CHECK(mod.a == inst.a);
}

TEST_CASE("paper profile at d = 65536, delta = 1") {
  const Params p = derive_params(65536, 1.0, Profile::Paper, {}, 2.0);
  CHECK(p.gamma == doctest::Approx(16.0));
  CHECK(p.n_terms == 2);
}
