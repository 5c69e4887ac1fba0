#include <doctest.h>

#include <bit>

#include "memlb/oracle.hpp"
#include "memlb/rng.hpp"
#include "support.hpp"

using namespace memlb;
using memlb::testing::naive_eval;
using memlb::testing::random_ball_point;

namespace {

HardInstance make(int d, double gamma, std::int64_t n, std::uint64_t seed) {
  DeskScaleOverrides ov;
  ov.gamma = gamma;
  ov.n_terms = n;
  return sample_instance(derive_params(d, 0.5, Profile::DeskScale, ov), seed);
}

}  // namespace

TEST_CASE("oracle value is bit-identical to eval_f and provenance matches a rescan") {
  std::mt19937_64 gen(1);
  const HardInstance inst = make(16, 0.3, 3, 4);
  for (int t = 0; t < 500; ++t) {
    Vector x = random_ball_point(16, gen);
    if (t % 2 == 0) x *= 1e-5;
    const OracleAnswer a = first_order(inst, x);
    CHECK(std::bit_cast<std::uint64_t>(a.value) == std::bit_cast<std::uint64_t>(eval_f(inst, x).value));
    const auto n = naive_eval(inst, x);
    CHECK(a.provenance.is_row() == n.is_row);
    CHECK(a.provenance.index == n.index);
    if (n.is_row) CHECK(a.provenance.sign == n.sign);
    CHECK((a.subgradient - subgradient_for(inst, a.provenance)).norm() == 0.0);
  }
}

TEST_CASE("subgradient shapes") {
  const HardInstance inst = make(8, 0.3, 2, 3);
  const double scale = 1.0 / std::sqrt(8.0);
  const Vector g = subgradient_for(inst, Term::row(2, -1));
  CHECK((g + inst.a.row(1).transpose() * scale).norm() == doctest::Approx(0.0));
  const Vector h = subgradient_for(inst, Term::nem(1));
  CHECK((h - inst.nemirovski.row(0).transpose() * scale / inst.params.l_scale).norm() == doctest::Approx(0.0));
}

TEST_CASE("duplicate rows resolve to the smallest index") {
  HardInstance inst = make(8, 0.3, 2, 8);
  inst.a.row(2) = inst.a.row(0);
  Vector x = inst.a.row(0).transpose() / 8.0;  // |⟨a₁,x⟩| = 1, the maximum possible at this norm
  const OracleAnswer ans = first_order(inst, x);
  CHECK(ans.provenance == Term::row(1, 1));
  const OracleAnswer neg = first_order(inst, -x);
  CHECK(neg.provenance == Term::row(1, -1));
}

TEST_CASE("subgradient inequality holds on random probes") {
  std::mt19937_64 gen(2);
  for (int d : {8, 32}) {
    const HardInstance inst = make(d, 0.3, 2, 10);
    for (int t = 0; t < 50; ++t) {
      const Vector x = random_ball_point(d, gen);
      const SubgradientReport rep = verify_subgradient(inst, x, first_order(inst, x), 100, 100 + t);
      CHECK(rep.violations == 0);
      CHECK(rep.worst_gap <= kSubgradientTolerance);
    }
  }
}

TEST_CASE("a wrong subgradient is caught") {
  const HardInstance inst = make(8, 0.3, 2, 12);
  const Vector x = Vector::Zero(8);
  OracleAnswer ans = first_order(inst, x);
  ans.subgradient = -ans.subgradient * 1e6;
  CHECK(verify_subgradient(inst, x, ans, 200, 1).violations > 0);
}

TEST_CASE("ball and sphere samplers") {
  Rng rng(9);
  for (int t = 0; t < 200; ++t) {
    CHECK(sample_unit_ball(10, rng).norm() <= 1.0);
    CHECK(sample_unit_sphere(10, rng).norm() == doctest::Approx(1.0));
  }
}
