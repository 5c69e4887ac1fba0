#include <doctest.h>

#include <boost/math/distributions/binomial.hpp>
#include <cmath>

#include "memlb/stats.hpp"

using namespace memlb;

TEST_CASE("Clopper-Pearson endpoints") {
  const Interval none = clopper_pearson(0, 10);
  CHECK(none.lo == 0.0);
  CHECK(none.hi == doctest::Approx(1.0 - std::pow(0.025, 0.1)).epsilon(1e-9));
  const Interval all = clopper_pearson(10, 10);
  CHECK(all.hi == 1.0);
  CHECK(all.lo == doctest::Approx(std::pow(0.025, 0.1)).epsilon(1e-9));
  const Interval half = clopper_pearson(5, 10);
  CHECK(half.lo == doctest::Approx(0.187086).epsilon(1e-5));
  CHECK(half.hi == doctest::Approx(0.812914).epsilon(1e-5));
  CHECK(half.contains(0.5));
}

TEST_CASE("interval coverage at the endpoints of the binomial") {
  // P[X ≥ k | p = lo] = 0.025 and P[X ≤ k | p = hi] = 0.025
  const std::uint64_t n = 40;
  const std::uint64_t k = 13;
  const Interval ci = clopper_pearson(k, n);
  const boost::math::binomial_distribution<double> at_lo(n, ci.lo);
  const boost::math::binomial_distribution<double> at_hi(n, ci.hi);
  CHECK(boost::math::cdf(boost::math::complement(at_lo, k - 1)) == doctest::Approx(0.025).epsilon(1e-6));
  CHECK(boost::math::cdf(at_hi, k) == doctest::Approx(0.025).epsilon(1e-6));
}

TEST_CASE("binomial upper tail against a direct sum") {
  for (std::uint64_t n : {5u, 20u, 60u}) {
    for (double p : {0.1, 0.5, 0.93}) {
      for (std::uint64_t k = 0; k <= n; k += 3) {
        double direct = 0.0;
        for (std::uint64_t j = k; j <= n; ++j) {
          double c = 1.0;
          for (std::uint64_t t = 0; t < j; ++t) c = c * static_cast<double>(n - t) / static_cast<double>(t + 1);
          direct += c * std::pow(p, static_cast<double>(j)) * std::pow(1.0 - p, static_cast<double>(n - j));
        }
        CHECK(binomial_upper_tail(n, k, p) == doctest::Approx(direct).epsilon(1e-9));
      }
    }
  }
  CHECK(binomial_sigma(0.5, 100) == doctest::Approx(0.05));
}
