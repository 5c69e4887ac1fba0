#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

namespace memlb {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Row-major dense storage; used for ±1 sign matrices and for stacks of
/// Nemirovski vectors where rows are accessed individually.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Inner product with a fixed left-to-right summation order. Every component
/// that must reproduce another component's arithmetic bit-for-bit (oracle,
/// protocol simulation, instrument) goes through this routine.
double dot_ordered(const double* a, const double* b, std::size_t n) noexcept;

inline double dot_ordered(const Vector& a, const Vector& b) noexcept {
  return dot_ordered(a.data(), b.data(), static_cast<std::size_t>(a.size()));
}

double infinity_norm(const Vector& x) noexcept;

/// Max over rows of |⟨row, x⟩|, using dot_ordered.
double row_infinity_norm(const RowMatrix& rows, const Vector& x) noexcept;

/// Orthonormal basis (columns) of span(columns of `m`), computed by modified
/// Gram-Schmidt with one re-orthogonalization pass. Columns whose residual norm
/// falls below `drop_tol` are dropped.
Matrix orthonormal_basis(const Matrix& m, double drop_tol = 1e-10);

/// Euclidean projection onto the closed unit ball.
Vector project_to_ball(const Vector& x);

}  // namespace memlb
