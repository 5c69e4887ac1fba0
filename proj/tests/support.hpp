#pragma once

// Independent reference implementations for tests. Nothing here calls the
// library's evaluation kernels.

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <vector>

#include "memlb/instance.hpp"

namespace memlb::testing {

struct NaiveEval {
  double value;
  bool is_row;
  std::size_t index;  // 1-based
  int sign;
};

// Plain scan with the documented tie rules: rows first, smallest j, + at zero;
// then the smallest Nemirovski index, and a Nemirovski term only wins when it
// is strictly larger.
inline NaiveEval naive_eval(const HardInstance& inst, const Vector& x) {
  const auto& p = inst.params;
  NaiveEval best{0.0, true, 1, 1};
  double top = -INFINITY;
  for (Eigen::Index j = 0; j < inst.a.rows(); ++j) {
    double ip = 0.0;
    for (Eigen::Index c = 0; c < inst.a.cols(); ++c) ip += inst.a(j, c) * x[c];
    const double term = p.l_scale * std::abs(ip) - 1.0;
    if (term > top) {
      top = term;
      best = {0.0, true, static_cast<std::size_t>(j) + 1, ip < 0.0 ? -1 : 1};
    }
  }
  for (Eigen::Index i = 0; i < inst.nemirovski.rows(); ++i) {
    double ip = 0.0;
    for (Eigen::Index c = 0; c < inst.nemirovski.cols(); ++c) ip += inst.nemirovski(i, c) * x[c];
    const double term = ip - static_cast<double>(i + 1) * p.gamma;
    if (term > top) {
      top = term;
      best = {0.0, false, static_cast<std::size_t>(i) + 1, 1};
    }
  }
  best.value = top / (std::sqrt(static_cast<double>(p.d)) * p.l_scale);
  return best;
}

inline Vector random_ball_point(int d, std::mt19937_64& gen) {
  std::normal_distribution<double> n01;
  std::uniform_real_distribution<double> u01;
  Vector x(d);
  for (int i = 0; i < d; ++i) x[i] = n01(gen);
  return x / x.norm() * std::pow(u01(gen), 1.0 / d);
}

inline Vector random_unit(int d, std::mt19937_64& gen) {
  std::normal_distribution<double> n01;
  Vector x(d);
  for (int i = 0; i < d; ++i) x[i] = n01(gen);
  return x / x.norm();
}

// Projector onto the orthogonal complement of the column span of m.
inline Matrix complement_projector(const Matrix& m) {
  const int d = static_cast<int>(m.rows());
  if (m.cols() == 0) return Matrix::Identity(d, d);
  const Matrix pinv = m.completeOrthogonalDecomposition().pseudoInverse();
  return Matrix::Identity(d, d) - m * pinv;
}

}  // namespace memlb::testing
