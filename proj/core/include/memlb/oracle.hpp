#pragma once

#include <cstdint>

#include "memlb/instance.hpp"

namespace memlb {

/// Value and subgradient returned for one query, plus which term produced them.
struct OracleAnswer {
  double value = 0.0;
  Vector subgradient;
  Term provenance;
};

/// Exact first-order oracle: rows beat Nemirovski terms on ties, the smallest
/// row index wins among rows, the smallest i among Nemirovski terms. The row
/// sign follows ⟨a_j, x⟩ and is + when the product is exactly zero.
/// `value` is bit-identical to eval_f(inst, x).value.
OracleAnswer first_order(const HardInstance& inst, const Vector& x);

/// Subgradient implied by a term tag: ±a_j/√d or v_i/(√d L).
Vector subgradient_for(const HardInstance& inst, const Term& term);

struct SubgradientReport {
  std::uint64_t violations = 0;
  /// max over probes of F(x) + ⟨g, y−x⟩ − F(y); −∞ when no probes were drawn.
  double worst_gap = 0.0;
};

inline constexpr double kSubgradientTolerance = 1e-9;

/// Draws `probes` points uniformly from the unit ball and counts violations of
/// F(y) ≥ F(x) + ⟨g, y − x⟩ − 1e-9.
SubgradientReport verify_subgradient(const HardInstance& inst, const Vector& x,
                                     const OracleAnswer& answer, std::uint64_t probes,
                                     std::uint64_t seed);

/// Uniform sample from the unit ball in R^d (Gaussian direction, radius U^{1/d}).
Vector sample_unit_ball(int d, class Rng& rng);

/// Uniform sample from the unit sphere.
Vector sample_unit_sphere(int d, class Rng& rng);

}  // namespace memlb
