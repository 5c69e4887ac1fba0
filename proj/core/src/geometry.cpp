#include "memlb/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "memlb/errors.hpp"
#include "memlb/rng.hpp"

namespace memlb {

PackingResult greedy_packing(const std::vector<Vector>& points, double alpha) {
  if (!(alpha > 0.0)) throw PreconditionViolated("packing radius must be positive");
  PackingResult out;
  out.alpha = alpha;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const bool far = std::all_of(out.indices.begin(), out.indices.end(),
                                 [&](std::size_t k) { return (points[i] - points[k]).norm() >= alpha; });
    if (far) out.indices.push_back(i);
  }
  return out;
}

namespace {

void require_unit(const std::vector<Vector>& points) {
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (std::abs(points[i].norm() - 1.0) > kUnitTolerance) {
      throw NonUnitInput("point " + std::to_string(i) + " is not unit norm");
    }
  }
}

// Residual of y against an orthonormal basis held in the first `rank` columns.
Vector residual(const Matrix& basis, Eigen::Index rank, const Vector& y) {
  Vector r = y;
  for (int pass = 0; pass < 2; ++pass) {
    for (Eigen::Index k = 0; k < rank; ++k) r -= basis.col(k).dot(r) * basis.col(k);
  }
  return r;
}

}  // namespace

RliSequence greedy_rli(const std::vector<Vector>& points, double gamma_rli, std::size_t max_len) {
  if (!(gamma_rli > 0.0 && gamma_rli <= 1.0)) throw PreconditionViolated("gamma_rli must lie in (0, 1]");
  require_unit(points);
  RliSequence out;
  out.gamma_rli = gamma_rli;
  if (points.empty() || max_len == 0) return out;
  const Eigen::Index d = points.front().size();
  Matrix basis(d, std::min<Eigen::Index>(d, static_cast<Eigen::Index>(max_len)));
  Eigen::Index rank = 0;
  for (std::size_t i = 0; i < points.size() && out.indices.size() < max_len; ++i) {
    const Vector r = residual(basis, rank, points[i]);
    const double norm = r.norm();
    if (norm >= gamma_rli) {
      out.indices.push_back(i);
      out.residual_norms.push_back(norm);
      if (rank < basis.cols()) basis.col(rank++) = r / norm;
    } else {
      out.rejected.push_back(i);
      out.rejected_residuals.push_back(norm);
    }
  }
  return out;
}

std::vector<double> rli_residuals(const std::vector<Vector>& sequence) {
  std::vector<double> out;
  if (sequence.empty()) return out;
  const Eigen::Index d = sequence.front().size();
  Matrix basis(d, d);
  Eigen::Index rank = 0;
  for (const Vector& y : sequence) {
    const Vector r = residual(basis, rank, y);
    const double norm = r.norm();
    out.push_back(norm);
    if (norm > 1e-12 && rank < d) basis.col(rank++) = r / norm;
  }
  return out;
}

RliBasis rli_orthonormal(const std::vector<Vector>& sequence, double delta, std::uint64_t probes,
                         std::uint64_t seed) {
  if (!(delta > 0.0 && delta <= 1.0)) throw PreconditionViolated("delta must lie in (0, 1]");
  if (sequence.empty()) throw PreconditionViolated("rli_orthonormal needs a non-empty sequence");
  require_unit(sequence);
  const Eigen::Index d = sequence.front().size();
  const auto len = static_cast<Eigen::Index>(sequence.size());

  // ‖proj y_j‖² = 1 − ‖residual‖² for unit y_j.
  const std::vector<double> res = rli_residuals(sequence);
  for (std::size_t j = 1; j < res.size(); ++j) {
    const double proj = std::sqrt(std::max(0.0, 1.0 - res[j] * res[j]));
    if (proj > 1.0 - delta + 1e-12) {
      throw NotRli("vector " + std::to_string(j + 1) + " has projection " + std::to_string(proj) +
                   " onto its prefix, above 1 − δ");
    }
  }

  Matrix x(d, len);
  for (Eigen::Index j = 0; j < len; ++j) x.col(j) = sequence[static_cast<std::size_t>(j)];

  RliBasis out;
  const Eigen::Index cols = len / 2;
  out.u.resize(d, cols);
  Matrix prefix(d, len);
  Eigen::Index rank = 0;
  Eigen::Index filled = 0;
  for (Eigen::Index j = 0; j < len; ++j) {
    const Vector r = residual(prefix, rank, x.col(j));
    const double norm = r.norm();
    if (j % 2 == 0 && filled < cols) out.u.col(filled++) = r / norm;
    if (norm > 1e-12) prefix.col(rank++) = r / norm;
  }

  const double bound = static_cast<double>(d) / delta;
  Rng rng(seed);
  Vector a(d);
  for (std::uint64_t p = 0; p < probes; ++p) {
    if (p % 2 == 0) {
      for (Eigen::Index i = 0; i < d; ++i) a[i] = rng.gaussian();
    } else {
      for (Eigen::Index i = 0; i < d; ++i) a[i] = rng.sign();
    }
    const double lhs = cols == 0 ? 0.0 : (out.u.transpose() * a).cwiseAbs().maxCoeff();
    const double rhs = bound * (x.transpose() * a).cwiseAbs().maxCoeff();
    const double ratio = rhs > 0.0 ? lhs / rhs : (lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    out.worst_ratio = std::max(out.worst_ratio, ratio);
    if (ratio > 1.0) ++out.failures;
  }
  out.probes = probes;
  out.verified = out.failures == 0;
  return out;
}

TailEstimate khintchine_tail(const Vector& x, double t, std::uint64_t trials, std::uint64_t seed) {
  if (trials < 1) throw PreconditionViolated("khintchine_tail needs at least one trial");
  if (!(t >= 0.0)) throw PreconditionViolated("t must be ≥ 0");
  const double threshold = t * x.norm();
  Rng rng(seed);
  TailEstimate out;
  out.trials = trials;
  for (std::uint64_t k = 0; k < trials; ++k) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) sum += rng.sign() * x[i];
    if (std::abs(sum) >= threshold) ++out.hits;
  }
  out.empirical = static_cast<double>(out.hits) / static_cast<double>(trials);
  return out;
}

KhintchineFit khintchine_sweep(const Vector& x, const std::vector<double>& grid, std::uint64_t trials,
                               std::uint64_t seed) {
  KhintchineFit fit;
  fit.c2 = std::numeric_limits<double>::infinity();
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const TailEstimate e = khintchine_tail(x, grid[g], trials, derive_seed(seed, stream::kProbe, g));
    fit.t.push_back(grid[g]);
    fit.tail.push_back(e);
    if (e.hits > 0 && grid[g] > 0.0) {
      fit.c2 = std::min(fit.c2, -std::log(e.empirical / 2.0) / (grid[g] * grid[g]));
    }
  }
  if (!std::isfinite(fit.c2)) fit.c2 = 0.0;
  return fit;
}

TailEstimate projection_tail(const Matrix& u, double t, std::uint64_t trials, std::uint64_t seed) {
  if (trials < 1) throw PreconditionViolated("projection_tail needs at least one trial");
  const Eigen::Index r = u.cols();
  const Eigen::Index d = u.rows();
  if ((u.transpose() * u - Matrix::Identity(r, r)).cwiseAbs().maxCoeff() > 1e-9) {
    throw NotOrthonormal("UᵀU differs from the identity by more than 1e-9");
  }
  const double mean = static_cast<double>(r) / static_cast<double>(d);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  Rng rng(seed);
  TailEstimate out;
  out.trials = trials;
  Vector v(d);
  for (std::uint64_t k = 0; k < trials; ++k) {
    for (Eigen::Index i = 0; i < d; ++i) v[i] = rng.sign() * scale;
    const double q = (u.transpose() * v).squaredNorm();
    if (std::abs(q - mean) >= t) ++out.hits;
  }
  out.empirical = static_cast<double>(out.hits) / static_cast<double>(trials);
  return out;
}

}  // namespace memlb
