#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "memlb/linalg.hpp"

namespace memlb {

struct PackingResult {
  std::vector<std::size_t> indices;
  double alpha = 0.0;
};

/// Scans points in input order and keeps a point iff it is at distance ≥ alpha
/// from every kept point. The result is α-separated and inclusion-maximal.
/// Throws PreconditionViolated unless alpha > 0.
PackingResult greedy_packing(const std::vector<Vector>& points, double alpha);

struct RliSequence {
  std::vector<std::size_t> indices;
  double gamma_rli = 0.0;
  /// Residual norm of each accepted point against the span of its predecessors.
  std::vector<double> residual_norms;
  std::vector<std::size_t> rejected;
  /// Residual norm of each rejected point at the time it was rejected.
  std::vector<double> rejected_residuals;
};

inline constexpr double kUnitTolerance = 1e-9;

/// Greedy γ-RLI selection. A point is accepted when its residual against the
/// span of the accepted prefix has norm ≥ gamma_rli; stops at max_len.
/// Throws NonUnitInput, PreconditionViolated (γ ∉ (0, 1]).
RliSequence greedy_rli(const std::vector<Vector>& points, double gamma_rli, std::size_t max_len);

/// Residual norms of each vector against the span of its predecessors.
std::vector<double> rli_residuals(const std::vector<Vector>& sequence);

struct RliBasis {
  Matrix u;  // d × ⌊L/2⌋, orthonormal columns
  bool verified = false;
  /// max over probes of ‖Uᵀa‖∞ / ((d/δ)·‖Xᵀa‖∞); verified iff ≤ 1.
  double worst_ratio = 0.0;
  std::uint64_t probes = 0;
  std::uint64_t failures = 0;
};

/// Builds U from the normalized residuals of the odd-indexed (1st, 3rd, ...)
/// vectors against all earlier vectors, then probes ‖Uᵀa‖∞ ≤ (d/δ)‖Xᵀa‖∞
/// with `probes` directions, half Gaussian and half random signs.
/// Throws NotRli unless every ‖proj_{span(prefix)} y_j‖ ≤ 1 − δ; NonUnitInput.
RliBasis rli_orthonormal(const std::vector<Vector>& sequence, double delta, std::uint64_t probes = 10000,
                         std::uint64_t seed = 0);

struct TailEstimate {
  double empirical = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t hits = 0;
};

/// Monte Carlo P[|Σ σ_i x_i| ≥ t‖x‖₂] over uniform random signs σ.
TailEstimate khintchine_tail(const Vector& x, double t, std::uint64_t trials, std::uint64_t seed);

struct KhintchineFit {
  std::vector<double> t;
  std::vector<TailEstimate> tail;
  /// Largest c₂ with empirical(t) ≤ 2·exp(−c₂ t²) at every grid point with hits.
  double c2 = 0.0;
};

/// Sweeps t over `grid`, each point with an independent derived seed.
KhintchineFit khintchine_sweep(const Vector& x, const std::vector<double>& grid, std::uint64_t trials,
                               std::uint64_t seed);

/// Monte Carlo P[|‖Uᵀv‖² − r/d| ≥ t] for v uniform on {±1/√d}^d.
/// Throws NotOrthonormal unless UᵀU = I to 1e-9.
TailEstimate projection_tail(const Matrix& u, double t, std::uint64_t trials, std::uint64_t seed);

}  // namespace memlb
