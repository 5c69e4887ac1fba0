#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "memlb/bits.hpp"
#include "memlb/instance.hpp"
#include "memlb/oracle.hpp"

namespace memlb {

/// The only state an algorithm may carry between rounds.
using MemoryState = BitString;

/// A memory-bounded first-order algorithm as a state machine over bit strings.
/// Implementations are stateless objects: every method is a pure function of
/// its arguments, so the memory state is the sole channel between rounds.
class Algorithm {
 public:
  virtual ~Algorithm() = default;

  virtual std::string name() const = 0;
  virtual int dim() const = 0;
  /// S, the exact length of every MemoryState this algorithm produces.
  virtual std::size_t declared_size() const = 0;

  virtual MemoryState init(std::uint64_t seed) const = 0;
  virtual Vector query(const MemoryState& m) const = 0;
  virtual MemoryState update(const MemoryState& m, double value, const Vector& subgradient) const = 0;
  virtual Vector output(const MemoryState& m) const = 0;
  virtual bool halted(const MemoryState&) const { return false; }
};

using AlgorithmPtr = std::shared_ptr<const Algorithm>;

struct InstanceRef {
  std::uint64_t seed = 0;
  std::uint64_t digest = 0;
  Params params;

  static InstanceRef of(const HardInstance& inst) { return {inst.seed, inst.digest(), inst.params}; }
  bool matches(const HardInstance& inst) const {
    return seed == inst.seed && digest == inst.digest() && params == inst.params;
  }
};

struct Round {
  Vector x;
  OracleAnswer answer;
};

struct Transcript {
  InstanceRef instance;
  std::string algorithm;
  std::uint64_t alg_seed = 0;
  std::size_t t_budget = 0;
  std::vector<Round> rounds;
  Vector final_output;
  /// Length of the memory state carried out of each round.
  std::vector<std::size_t> state_sizes;
};

/// Runs the init/query/oracle/update loop for t_budget rounds (fewer if the
/// algorithm halts). The last recorded query is always output(M) of the state
/// reached, so the final query equals the reported output.
///
/// Throws StateSizeViolation(round), QueryOutOfBall(round).
Transcript run(const Algorithm& alg, const HardInstance& inst, std::size_t t_budget,
               std::uint64_t seed);

struct StepRule {
  enum class Kind : std::uint8_t { Fixed, Decreasing };
  Kind kind = Kind::Fixed;
  double eta = 0.1;

  static StepRule fixed(double eta) { return {Kind::Fixed, eta}; }
  /// η_t = eta / √t with iterate averaging.
  static StepRule decreasing(double eta0 = 1.0) { return {Kind::Decreasing, eta0}; }
};

/// Projected subgradient method x ← Proj_B(x − η_t g). State layout (64-bit
/// doubles): Fixed keeps the iterate (S = 64d); Decreasing keeps the iterate,
/// the running average of queried iterates and a 64-bit round counter
/// (S = 128d + 64) and outputs the average.
AlgorithmPtr subgradient_descent(int d, StepRule rule);

/// Central-cut ellipsoid method over the unit ball. State: center c and a
/// factor J with shape matrix P = J Jᵀ (S = 64(d + d²)). Queries the center;
/// after each objective cut, feasibility cuts pull the center back into the ball.
/// update throws DegenerateEllipsoid when ‖Jᵀg‖ is zero or non-finite.
AlgorithmPtr ellipsoid_method(int d);

inline constexpr std::size_t kNeverReached = std::numeric_limits<std::size_t>::max();

struct AlgorithmSpec {
  std::string name;
  std::function<AlgorithmPtr(int d)> make;
};

struct FrontierConfig {
  double delta = 0.5;
  DeskScaleOverrides overrides;
  double log_base = 2.0;
  std::vector<int> d_list;
  std::vector<std::uint64_t> seeds;
  std::size_t t_budget = 1000;
  /// Gap thresholds in units of ε: threshold g means F(x_t) − F(x̂) ≤ g·ε.
  std::vector<double> gap_thresholds;
};

struct FrontierRow {
  std::string algorithm;
  int d = 0;
  std::size_t state_bits = 0;
  std::vector<double> gap_thresholds;
  /// per_seed[s][g]: first round whose query meets threshold g, or kNeverReached.
  std::vector<std::vector<std::size_t>> per_seed;
  /// Median over seeds per threshold (kNeverReached if the median seed never reached it).
  std::vector<std::size_t> median_queries;
  std::vector<double> reached_fraction;
};

/// One row per (algorithm, d); instance seed = config seed, algorithm seed derived.
std::vector<FrontierRow> measure_frontier(const std::vector<AlgorithmSpec>& algs,
                                          const FrontierConfig& config, unsigned jobs = 1);

/// First 1-based round whose query value is within `threshold` of `reference`.
std::size_t queries_to_gap(const Transcript& t, double reference, double threshold);

}  // namespace memlb
