#pragma once

#include <cstdint>

namespace memlb {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;

  bool contains(double x) const { return lo <= x && x <= hi; }
};

/// Exact (Clopper-Pearson) two-sided interval for a binomial proportion.
Interval clopper_pearson(std::uint64_t successes, std::uint64_t trials, double level = 0.95);

/// P[X ≥ k] for X ~ Binomial(n, p), summed in log space.
double binomial_upper_tail(std::uint64_t n, std::uint64_t k, double p);

/// Standard error of an empirical frequency, √(p(1−p)/n).
double binomial_sigma(double p, std::uint64_t trials);

}  // namespace memlb
