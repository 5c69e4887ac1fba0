#include <doctest.h>

#include "memlb/errors.hpp"
#include "memlb/instrument.hpp"
#include "memlb/optimizer.hpp"

using namespace memlb;

namespace {

HardInstance make(int d, std::uint64_t seed) {
  DeskScaleOverrides ov;
  ov.gamma = 0.3;
  return sample_instance(derive_params(d, 0.5, Profile::DeskScale, ov), seed);
}

// State grows by one bit each round.
class Leaky final : public Algorithm {
 public:
  std::string name() const override { return "leaky"; }
  int dim() const override { return 8; }
  std::size_t declared_size() const override { return 64; }
  MemoryState init(std::uint64_t) const override { return MemoryState(64); }
  Vector query(const MemoryState&) const override { return Vector::Zero(8); }
  MemoryState update(const MemoryState& m, double, const Vector&) const override {
    MemoryState n = m;
    n.push_bits(1, 1);
    return n;
  }
  Vector output(const MemoryState&) const override { return Vector::Zero(8); }
};

class Outside final : public Algorithm {
 public:
  std::string name() const override { return "outside"; }
  int dim() const override { return 8; }
  std::size_t declared_size() const override { return 1; }
  MemoryState init(std::uint64_t) const override { return MemoryState(1); }
  Vector query(const MemoryState&) const override { return Vector::Constant(8, 1.0); }
  MemoryState update(const MemoryState& m, double, const Vector&) const override { return m; }
  Vector output(const MemoryState&) const override { return Vector::Zero(8); }
};

}  // namespace

TEST_CASE("declared state sizes") {
  CHECK(subgradient_descent(16, StepRule::fixed(0.1))->declared_size() == 64 * 16);
  CHECK(subgradient_descent(16, StepRule::decreasing(0.1))->declared_size() == 128 * 16 + 64);
  CHECK(ellipsoid_method(16)->declared_size() == 64 * (16 + 256));
  CHECK_THROWS_AS(subgradient_descent(8, StepRule::fixed(-1.0)), PreconditionViolated);
  CHECK_THROWS_AS(subgradient_descent(8, StepRule::decreasing(0.0)), PreconditionViolated);
  CHECK_THROWS_AS(ellipsoid_method(1), PreconditionViolated);
}

TEST_CASE("runs respect the state budget and end on the output") {
  const HardInstance inst = make(16, 1);
  for (const AlgorithmPtr& alg : {subgradient_descent(16, StepRule::fixed(0.01)),
                                  subgradient_descent(16, StepRule::decreasing(0.1)), ellipsoid_method(16)}) {
    const Transcript t = run(*alg, inst, 300, 77);
    CHECK(t.rounds.size() == 300);
    for (std::size_t s : t.state_sizes) CHECK(s == alg->declared_size());
    CHECK(t.rounds.back().x == t.final_output);
    for (const Round& r : t.rounds) CHECK(r.x.norm() <= 1.0 + kBallTolerance);
    const Transcript again = run(*alg, inst, 300, 77);
    for (std::size_t i = 0; i < t.rounds.size(); ++i) CHECK(t.rounds[i].x == again.rounds[i].x);
  }
}

TEST_CASE("harness rejects oversized states and queries outside the ball") {
  const HardInstance inst = make(8, 2);
  try {
    run(Leaky{}, inst, 10, 0);
    FAIL("expected StateSizeViolation");
  } catch (const StateSizeViolation& e) {
    CHECK(e.round() == 1);
  }
  try {
    run(Outside{}, inst, 10, 0);
    FAIL("expected QueryOutOfBall");
  } catch (const QueryOutOfBall& e) {
    CHECK(e.round() == 1);
  }
  CHECK_THROWS_AS(run(Leaky{}, inst, 0, 0), PreconditionViolated);
  CHECK_THROWS_AS(run(*ellipsoid_method(16), inst, 5, 0), PreconditionViolated);
}

TEST_CASE("fixed-step subgradient follows the update formula") {
  const HardInstance inst = make(8, 3);
  const double eta = 0.05;
  const Transcript t = run(*subgradient_descent(8, StepRule::fixed(eta)), inst, 20, 0);
  Vector x = Vector::Zero(8);
  for (std::size_t r = 0; r + 1 < t.rounds.size(); ++r) {
    CHECK((t.rounds[r].x - x).norm() == 0.0);
    x -= eta * t.rounds[r].answer.subgradient;
    if (x.norm() > 1.0) x /= x.norm();
  }
}

TEST_CASE("decreasing-step output is the running average") {
  const HardInstance inst = make(8, 4);
  const Transcript t = run(*subgradient_descent(8, StepRule::decreasing(0.5)), inst, 50, 0);
  Vector avg = Vector::Zero(8);
  for (std::size_t r = 0; r + 1 < t.rounds.size(); ++r) avg += t.rounds[r].x;
  avg /= static_cast<double>(t.rounds.size() - 1);
  if (avg.norm() > 1.0) avg /= avg.norm();
  CHECK((t.final_output - avg).norm() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("ellipsoid reaches the reference value at small d") {
  const HardInstance inst = make(16, 5);
  const ReferenceOptimum ref = reference_optimum(inst);
  const Transcript t = run(*ellipsoid_method(16), inst, 3000, 0);
  CHECK(epsilon_success(t, inst, ref).success);
  CHECK(queries_to_gap(t, ref.value, inst.params.eps) != kNeverReached);
}
