#include "memlb/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/beta.hpp>
#include <cmath>

#include "memlb/errors.hpp"

namespace memlb {

Interval clopper_pearson(std::uint64_t successes, std::uint64_t trials, double level) {
  if (trials == 0) throw PreconditionViolated("interval needs at least one trial");
  if (successes > trials) throw PreconditionViolated("successes exceed trials");
  if (!(level > 0.0 && level < 1.0)) throw PreconditionViolated("level must lie in (0, 1)");
  const double alpha = 1.0 - level;
  const auto k = static_cast<double>(successes);
  const auto n = static_cast<double>(trials);
  Interval out;
  if (successes > 0) {
    out.lo = boost::math::quantile(boost::math::beta_distribution<>(k, n - k + 1.0), alpha / 2.0);
  }
  if (successes < trials) {
    out.hi = boost::math::quantile(boost::math::beta_distribution<>(k + 1.0, n - k), 1.0 - alpha / 2.0);
  }
  return out;
}

double binomial_upper_tail(std::uint64_t n, std::uint64_t k, double p) {
  if (k == 0) return 1.0;
  if (k > n) return 0.0;
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  const auto nn = static_cast<double>(n);
  double total = 0.0;
  for (std::uint64_t j = k; j <= n; ++j) {
    const auto jj = static_cast<double>(j);
    const double log_term = std::lgamma(nn + 1.0) - std::lgamma(jj + 1.0) - std::lgamma(nn - jj + 1.0) +
                            jj * std::log(p) + (nn - jj) * std::log1p(-p);
    total += std::exp(log_term);
  }
  return std::min(total, 1.0);
}

double binomial_sigma(double p, std::uint64_t trials) {
  if (trials == 0) return 0.0;
  return std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

}  // namespace memlb
