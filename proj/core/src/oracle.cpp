#include "memlb/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "memlb/errors.hpp"
#include "memlb/rng.hpp"

namespace memlb {

Vector subgradient_for(const HardInstance& inst, const Term& term) {
  const double sqrt_d = std::sqrt(static_cast<double>(inst.dim()));
  const auto idx = static_cast<Eigen::Index>(term.index - 1);
  if (term.is_row()) {
    return (static_cast<double>(term.sign) / sqrt_d) * inst.a.row(idx).transpose();
  }
  return inst.nemirovski.row(idx).transpose() * inst.params.outer_factor();
}

OracleAnswer first_order(const HardInstance& inst, const Vector& x) {
  const EvalResult eval = eval_f(inst, x);
  return {eval.value, subgradient_for(inst, eval.achieving_term), eval.achieving_term};
}

Vector sample_unit_sphere(int d, Rng& rng) {
  Vector g(d);
  double norm = 0.0;
  do {
    for (int i = 0; i < d; ++i) g[i] = rng.gaussian();
    norm = g.norm();
  } while (norm == 0.0);
  return g / norm;
}

Vector sample_unit_ball(int d, Rng& rng) {
  Vector dir = sample_unit_sphere(d, rng);
  const double radius = std::pow(rng.uniform(), 1.0 / static_cast<double>(d));
  return dir * radius;
}

SubgradientReport verify_subgradient(const HardInstance& inst, const Vector& x,
                                     const OracleAnswer& answer, std::uint64_t probes,
                                     std::uint64_t seed) {
  SubgradientReport report;
  report.worst_gap = -std::numeric_limits<double>::infinity();
  const double fx = eval_f(inst, x).value;
  Rng rng(seed);
  for (std::uint64_t p = 0; p < probes; ++p) {
    const Vector y = sample_unit_ball(inst.dim(), rng);
    const double fy = eval_f(inst, y).value;
    const double gap = fx + answer.subgradient.dot(y - x) - fy;
    report.worst_gap = std::max(report.worst_gap, gap);
    if (gap > kSubgradientTolerance) ++report.violations;
  }
  return report;
}

}  // namespace memlb
