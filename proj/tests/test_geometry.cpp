#include <doctest.h>

#include <boost/math/special_functions/binomial.hpp>

#include "memlb/errors.hpp"
#include "memlb/geometry.hpp"
#include "support.hpp"

using namespace memlb;
using memlb::testing::random_unit;

namespace {

std::size_t brute_force_packing(const std::vector<Vector>& pts, double alpha) {
  const std::size_t n = pts.size();
  std::size_t best = 0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    const auto size = static_cast<std::size_t>(std::popcount(mask));
    if (size <= best) continue;
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      if (!(mask >> i & 1u)) continue;
      for (std::size_t j = i + 1; j < n && ok; ++j) {
        if ((mask >> j & 1u) && (pts[i] - pts[j]).norm() < alpha) ok = false;
      }
    }
    if (ok) best = size;
  }
  return best;
}

}  // namespace

TEST_CASE("packing edge cases") {
  const std::vector<Vector> one = {Vector::Ones(3)};
  CHECK(greedy_packing(one, 0.5).indices == std::vector<std::size_t>{0});
  const std::vector<Vector> twins = {Vector::Ones(3), Vector::Ones(3)};
  CHECK(greedy_packing(twins, 0.1).indices == std::vector<std::size_t>{0});
  CHECK_THROWS_AS(greedy_packing(one, 0.0), PreconditionViolated);
}

TEST_CASE("packing is separated, maximal and no larger than the optimum") {
  std::mt19937_64 gen(21);
  for (int t = 0; t < 60; ++t) {
    const std::size_t n = 2 + gen() % 9;
    std::vector<Vector> pts;
    for (std::size_t i = 0; i < n; ++i) pts.push_back(memlb::testing::random_ball_point(3, gen));
    std::vector<double> dist;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) dist.push_back((pts[i] - pts[j]).norm());
    }
    std::nth_element(dist.begin(), dist.begin() + dist.size() / 2, dist.end());
    const double alpha = dist[dist.size() / 2];
    const PackingResult r = greedy_packing(pts, alpha);
    for (std::size_t a = 0; a < r.indices.size(); ++a) {
      for (std::size_t b = a + 1; b < r.indices.size(); ++b) CHECK((pts[r.indices[a]] - pts[r.indices[b]]).norm() >= alpha);
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (std::find(r.indices.begin(), r.indices.end(), i) != r.indices.end()) continue;
      bool blocked = false;
      for (std::size_t k : r.indices) blocked = blocked || (pts[i] - pts[k]).norm() < alpha;
      CHECK(blocked);
    }
    CHECK(r.indices.size() >= 1);
    CHECK(r.indices.size() <= brute_force_packing(pts, alpha));
  }
}

TEST_CASE("RLI on orthonormal and duplicated input") {
  std::vector<Vector> basis;
  for (int i = 0; i < 5; ++i) basis.push_back(Vector::Unit(5, i));
  const RliSequence all = greedy_rli(basis, 1.0, 10);
  CHECK(all.indices.size() == 5);
  for (double r : all.residual_norms) CHECK(r == doctest::Approx(1.0));
  const RliSequence dup = greedy_rli({basis[0], basis[0]}, 0.5, 10);
  CHECK(dup.indices.size() == 1);
  CHECK(dup.rejected == std::vector<std::size_t>{1});
  CHECK(dup.rejected_residuals[0] == doctest::Approx(0.0));
  CHECK_THROWS_AS(greedy_rli({Vector::Ones(5)}, 0.5, 3), NonUnitInput);
  CHECK_THROWS_AS(greedy_rli(basis, 0.0, 3), PreconditionViolated);
  CHECK(greedy_rli(basis, 0.5, 2).indices.size() == 2);
}

TEST_CASE("RLI residuals match explicit projectors") {
  std::mt19937_64 gen(4);
  for (int t = 0; t < 20; ++t) {
    std::vector<Vector> pts;
    for (int i = 0; i < 50; ++i) pts.push_back(random_unit(16, gen));
    const RliSequence seq = greedy_rli(pts, 0.3, 50);
    Matrix prefix(16, 0);
    for (std::size_t k = 0; k < seq.indices.size(); ++k) {
      const Vector& y = pts[seq.indices[k]];
      const double r = (memlb::testing::complement_projector(prefix) * y).norm();
      CHECK(std::abs(r - seq.residual_norms[k]) <= 1e-9);
      CHECK(r >= 0.3 - 1e-12);
      prefix.conservativeResize(16, prefix.cols() + 1);
      prefix.col(prefix.cols() - 1) = y;
    }
    std::vector<Vector> chosen;
    for (std::size_t i : seq.indices) chosen.push_back(pts[i]);
    const std::vector<double> again = rli_residuals(chosen);
    for (std::size_t k = 0; k < again.size(); ++k) CHECK(again[k] == doctest::Approx(seq.residual_norms[k]).epsilon(1e-9));
    for (double r : seq.rejected_residuals) CHECK(r < 0.3);
  }
}

TEST_CASE("orthonormal RLI basis") {
  std::vector<Vector> basis;
  for (int i = 0; i < 4; ++i) basis.push_back(Vector::Unit(8, i));
  const RliBasis b = rli_orthonormal(basis, 1.0, 500, 1);
  CHECK(b.u.cols() == 2);
  CHECK(b.verified);
  CHECK(b.worst_ratio <= 1.0);
  CHECK((b.u.col(0) - basis[0]).norm() == doctest::Approx(0.0));
  CHECK((b.u.col(1) - basis[2]).norm() == doctest::Approx(0.0));
  CHECK_THROWS_AS(rli_orthonormal({basis[0], basis[0]}, 0.5, 10, 1), NotRli);

  std::mt19937_64 gen(8);
  std::vector<Vector> pts;
  for (int i = 0; i < 40; ++i) pts.push_back(random_unit(16, gen));
  const RliSequence seq = greedy_rli(pts, 0.3, 8);
  std::vector<Vector> xs;
  for (std::size_t i : seq.indices) xs.push_back(pts[i]);
  const RliBasis r = rli_orthonormal(xs, 0.045, 1000, 2);
  CHECK(r.probes == 1000);
  CHECK((r.u.transpose() * r.u - Matrix::Identity(4, 4)).norm() <= 1e-9);
  Matrix x(16, static_cast<Eigen::Index>(xs.size()));
  for (std::size_t i = 0; i < xs.size(); ++i) x.col(static_cast<Eigen::Index>(i)) = xs[i];
  CHECK((memlb::testing::complement_projector(x) * r.u).norm() <= 1e-9);
  CHECK(r.verified == (r.failures == 0));
}

TEST_CASE("Khintchine tail: trivial cases and exact binomial") {
  CHECK(khintchine_tail(Vector::Unit(5, 0), 0.5, 1000, 1).empirical == 1.0);
  CHECK(khintchine_tail(Vector::Unit(5, 0), 2.0, 1000, 1).empirical == 0.0);
  for (int d : {6, 12, 20}) {
    const Vector x = Vector::Ones(d);
    for (double t : {0.5, 1.0, 2.0}) {
      double exact = 0.0;
      for (int k = 0; k <= d; ++k) {
        if (std::abs(2.0 * k - d) >= t * std::sqrt(static_cast<double>(d))) {
          exact += boost::math::binomial_coefficient<double>(d, k) * std::ldexp(1.0, -d);
        }
      }
      const std::uint64_t n = 20000;
      const TailEstimate e = khintchine_tail(x, t, n, static_cast<std::uint64_t>(d * 10 + t * 2));
      CHECK(std::abs(e.empirical - exact) <= 3.0 * std::sqrt(exact * (1 - exact) / n) + 1e-12);
    }
  }
  const KhintchineFit fit = khintchine_sweep(Vector::Ones(16), {0.5, 1.0, 1.5, 2.0}, 5000, 3);
  CHECK(fit.tail.size() == 4);
  CHECK(fit.c2 > 0.0);
  for (std::size_t i = 0; i < fit.t.size(); ++i) {
    if (fit.tail[i].hits > 0) CHECK(fit.tail[i].empirical <= 2.0 * std::exp(-fit.c2 * fit.t[i] * fit.t[i]) + 1e-12);
  }
}

TEST_CASE("projection tail trivial cases") {
  CHECK(projection_tail(Matrix::Identity(8, 8), 0.01, 500, 1).empirical == 0.0);
  CHECK(projection_tail(Matrix(Vector::Unit(8, 0)), 0.01, 500, 1).empirical == 0.0);
  CHECK_THROWS_AS(projection_tail(2.0 * Matrix::Identity(4, 4), 0.1, 10, 1), NotOrthonormal);
}
