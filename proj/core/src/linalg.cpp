#include "memlb/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace memlb {

double dot_ordered(const double* a, const double* b, std::size_t n) noexcept {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

double infinity_norm(const Vector& x) noexcept {
  return x.size() == 0 ? 0.0 : x.cwiseAbs().maxCoeff();
}

double row_infinity_norm(const RowMatrix& rows, const Vector& x) noexcept {
  double best = 0.0;
  const auto n = static_cast<std::size_t>(x.size());
  for (Eigen::Index j = 0; j < rows.rows(); ++j) {
    best = std::max(best, std::abs(dot_ordered(rows.row(j).data(), x.data(), n)));
  }
  return best;
}

Matrix orthonormal_basis(const Matrix& m, double drop_tol) {
  Matrix basis(m.rows(), m.cols());
  Eigen::Index rank = 0;
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    Vector r = m.col(c);
    const double original = r.norm();
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index k = 0; k < rank; ++k) r -= basis.col(k).dot(r) * basis.col(k);
    }
    const double norm = r.norm();
    if (norm > drop_tol * std::max(1.0, original)) basis.col(rank++) = r / norm;
  }
  basis.conservativeResize(Eigen::NoChange, rank);
  return basis;
}

Vector project_to_ball(const Vector& x) {
  const double n = x.norm();
  return n > 1.0 ? Vector(x / n) : x;
}

}  // namespace memlb
