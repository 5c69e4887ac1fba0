#include <doctest.h>

#include "memlb/errors.hpp"
#include "memlb/instrument.hpp"
#include "support.hpp"

using namespace memlb;

namespace {

HardInstance make(int d, double gamma, std::uint64_t seed) {
  DeskScaleOverrides ov;
  ov.gamma = gamma;
  ov.n_terms = 2;
  return sample_instance(derive_params(d, 0.5, Profile::DeskScale, ov), seed);
}

CorrelationTimes times_of(std::vector<std::size_t> t) {
  CorrelationTimes c;
  c.times = std::move(t);
  c.witness_queries.assign(c.times.size(), kInfiniteTime);
  return c;
}

// First round whose query is γ/4-correlated with v_i while ‖Ax‖∞ ≤ ξ.
std::vector<std::size_t> naive_times(const Transcript& t, const HardInstance& inst) {
  const Matrix a = inst.a;
  std::vector<std::size_t> out(inst.n_terms(), kInfiniteTime);
  for (std::size_t r = 0; r < t.rounds.size(); ++r) {
    const Vector& x = t.rounds[r].x;
    if ((a * x).cwiseAbs().maxCoeff() > inst.params.xi) continue;
    for (std::size_t i = 0; i < inst.n_terms(); ++i) {
      const double c = std::abs(inst.nemirovski.row(static_cast<Eigen::Index>(i)).dot(x));
      if (out[i] == kInfiniteTime && c >= inst.params.gamma / 4) out[i] = r + 1;
    }
  }
  return out;
}

}  // namespace

TEST_CASE("correlation times match a full rescan of the transcript") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const HardInstance inst = make(16, 0.3, seed);
    const AlgorithmPtr alg = seed % 2 ? ellipsoid_method(16) : subgradient_descent(16, StepRule::fixed(0.01));
    const Transcript t = run(*alg, inst, 4000, seed);
    const CorrelationTimes ct = correlation_times(t, inst);
    CHECK(ct.times == naive_times(t, inst));
    for (std::size_t i = 0; i < ct.times.size(); ++i) {
      if (ct.times[i] != kInfiniteTime) CHECK(ct.witness_queries[i] == ct.times[i] - 1);
    }
  }
}

TEST_CASE("transcripts from another instance are rejected") {
  const HardInstance a = make(8, 0.3, 1);
  const HardInstance b = make(8, 0.3, 2);
  const Transcript t = run(*ellipsoid_method(8), a, 10, 0);
  CHECK_THROWS_AS(correlation_times(t, b), InstanceMismatch);
  CHECK_THROWS_AS(epsilon_success(t, b, reference_optimum(b)), InstanceMismatch);
}

TEST_CASE("ordering check") {
  CHECK(check_ordering(times_of({kInfiniteTime, kInfiniteTime})).ordered);
  const OrderingResult r = check_ordering(times_of({3, 2, kInfiniteTime}));
  CHECK_FALSE(r.ordered);
  CHECK(r.first_violation == 2);
  CHECK(check_ordering(times_of({1, 1, 5})).ordered);
  CHECK_FALSE(check_ordering(times_of({kInfiniteTime, 4})).ordered);
}

TEST_CASE("gap index") {
  const GapIndexResult all = gap_index({times_of({1, 2, 3, 4})}, 100, 2);
  CHECK(all.i_star == 1);
  CHECK(all.success_rate == 1.0);
  const GapIndexResult none = gap_index({times_of({5, kInfiniteTime}), times_of({1, kInfiniteTime})}, 100, 10);
  CHECK(none.i_star == 1);
  CHECK(none.success_rate == 0.0);
  // index 2 wins in two of three trials, index 1 in one
  const GapIndexResult two = gap_index({times_of({1, 50, 52}), times_of({1, 60, 61}), times_of({1, 2, 90})}, 100, 4);
  CHECK(two.i_star == 2);
  CHECK(two.success_rate == doctest::Approx(2.0 / 3.0));
  CHECK(gap_event(times_of({1, 3}), 1, 100, 4));
  CHECK_FALSE(gap_event(times_of({1, 4}), 1, 100, 4));
  CHECK_FALSE(gap_event(times_of({1, 3}), 1, 2, 4));
}

TEST_CASE("reference optimum against an explicit projector") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const HardInstance inst = make(32, 0.3, seed);
    const ReferenceOptimum ref = reference_optimum(inst);
    CHECK(row_infinity_norm(inst.a, ref.point) <= 1e-8);
    CHECK(ref.value == eval_f(inst, ref.point).value);
    const Matrix p = memlb::testing::complement_projector(Matrix(inst.a.transpose()));
    Vector sum = Vector::Zero(32);
    for (Eigen::Index i = 0; i < inst.nemirovski.rows(); ++i) sum += p * inst.nemirovski.row(i).transpose();
    const double n = static_cast<double>(inst.n_terms());
    Vector x = -sum / (std::sqrt(n) * inst.params.log_d());
    if (x.norm() > 1.0) x /= x.norm();
    CHECK((x - ref.point).norm() <= 1e-10);
    CHECK(ref.projector_rank == 16);
  }
}

TEST_CASE("epsilon success at the reference point and at the origin") {
  const HardInstance inst = make(16, 0.3, 3);
  const ReferenceOptimum ref = reference_optimum(inst);
  Transcript t = run(*ellipsoid_method(16), inst, 2, 0);
  t.final_output = ref.point;
  const EpsilonSuccess at_ref = epsilon_success(t, inst, ref);
  CHECK(at_ref.gap == 0.0);
  CHECK(at_ref.success);
  t.final_output = Vector::Zero(16);
  const EpsilonSuccess at_zero = epsilon_success(t, inst, ref);
  CHECK(at_zero.gap == doctest::Approx(eval_f(inst, Vector::Zero(16)).value - ref.value));
  if (ref.value <= eval_f(inst, Vector::Zero(16)).value - 2 * inst.params.eps) CHECK_FALSE(at_zero.success);
}

TEST_CASE("objective bound formula") {
  const Params p = make(64, 0.4, 1).params;
  const double lg = 6.0;
  CHECK(objective_bound(p, 2.0) == doctest::Approx(-1.0 / (8.0 * p.l_scale) / (std::sqrt(2.0) * lg * lg)));
}
