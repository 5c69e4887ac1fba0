#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "memlb/instance.hpp"
#include "memlb/optimizer.hpp"

namespace memlb {

/// Sentinel for t_i = ∞; compares greater than every round index.
inline constexpr std::size_t kInfiniteTime = std::numeric_limits<std::size_t>::max();

/// t_i for i = 1..N (stored at i−1). witness_queries[i−1] is the 0-based index
/// of the witnessing query in the transcript, or kInfiniteTime.
struct CorrelationTimes {
  std::vector<std::size_t> times;
  std::vector<std::size_t> witness_queries;
};

/// Online detector: a query is a witness for v_i when |⟨x, v_i⟩| ≥ γ/4 and
/// ‖Ax‖∞ ≤ ξ. Records only the first witness per index.
class CorrelationTracker {
 public:
  explicit CorrelationTracker(const HardInstance& inst);

  /// `round` is 1-based. Returns true if any t_i became finite.
  bool observe(const Vector& x, std::size_t round);
  const CorrelationTimes& times() const noexcept { return times_; }
  /// 1-based accessor.
  std::size_t time(std::size_t i) const { return times_.times.at(i - 1); }

 private:
  const HardInstance& inst_;
  double corr_threshold_;
  double orth_threshold_;
  CorrelationTimes times_;
};

/// Throws InstanceMismatch when the transcript was produced on another instance.
CorrelationTimes correlation_times(const Transcript& transcript, const HardInstance& inst);

struct ReferenceOptimum {
  Vector point;
  double value = 0.0;
  std::size_t projector_rank = 0;
  /// ‖x̂‖₂ before any rescaling.
  double raw_norm = 0.0;
  /// false when ‖x̂‖₂ > 1 and the point was rescaled to unit norm.
  bool norm_event = true;
};

/// x̂ = −(1/(√N log d)) Σ v̂_i with v̂_i the projection of v_i onto the
/// orthogonal complement of row(A). Uses the actual numerical rank of A.
/// Throws PreconditionViolated unless N·log²d > 1.
ReferenceOptimum reference_optimum(const HardInstance& inst);

/// −(1/(√d L)) · 1/(√N log²d), with log taken in `log_base`.
double objective_bound(const Params& params, double log_base);

struct OrderingResult {
  bool ordered = true;
  /// 1-based index i of the first t_i < t_{i−1}.
  std::optional<std::size_t> first_violation;
};

OrderingResult check_ordering(const CorrelationTimes& times);

struct GapIndexResult {
  std::size_t i_star = 1;  // 1-based, in [1, N−1]
  double success_rate = 0.0;
  std::vector<double> rates;  // rates[i−1] for i = 1..N−1
};

/// Empirical probability, per i, of t_i ≤ t_{i+1} ≤ t_budget and
/// t_{i+1} − t_i ≤ n_rows/2; returns the maximizing i (smallest on ties).
GapIndexResult gap_index(const std::vector<CorrelationTimes>& trials, std::size_t t_budget,
                         std::size_t n_rows);

/// The per-trial gap event at index i (1-based).
bool gap_event(const CorrelationTimes& times, std::size_t i, std::size_t t_budget,
               std::size_t n_rows);

struct EpsilonSuccess {
  double gap = 0.0;
  bool success = false;
};

/// gap = F(output) − F(x̂); success iff gap ≤ ε.
EpsilonSuccess epsilon_success(const Transcript& transcript, const HardInstance& inst,
                               const ReferenceOptimum& ref);

}  // namespace memlb
