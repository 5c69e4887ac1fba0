#include "memlb/instrument.hpp"

#include <algorithm>
#include <cmath>

#include "memlb/errors.hpp"

namespace memlb {

CorrelationTracker::CorrelationTracker(const HardInstance& inst)
    : inst_(inst), corr_threshold_(inst.params.gamma / 4.0), orth_threshold_(inst.params.xi) {
  times_.times.assign(inst.n_terms(), kInfiniteTime);
  times_.witness_queries.assign(inst.n_terms(), kInfiniteTime);
}

bool CorrelationTracker::observe(const Vector& x, std::size_t round) {
  if (row_infinity_norm(inst_.a, x) > orth_threshold_) return false;
  bool changed = false;
  const auto n = static_cast<std::size_t>(x.size());
  for (std::size_t i = 0; i < times_.times.size(); ++i) {
    if (times_.times[i] != kInfiniteTime) continue;
    const double ip =
        dot_ordered(inst_.nemirovski.row(static_cast<Eigen::Index>(i)).data(), x.data(), n);
    if (std::abs(ip) >= corr_threshold_) {
      times_.times[i] = round;
      times_.witness_queries[i] = round - 1;
      changed = true;
    }
  }
  return changed;
}

CorrelationTimes correlation_times(const Transcript& transcript, const HardInstance& inst) {
  if (!transcript.instance.matches(inst)) {
    throw InstanceMismatch("transcript was not produced against this instance");
  }
  CorrelationTracker tracker(inst);
  for (std::size_t t = 0; t < transcript.rounds.size(); ++t) {
    tracker.observe(transcript.rounds[t].x, t + 1);
  }
  return tracker.times();
}

double objective_bound(const Params& params, double log_base) {
  const double lg = std::log(static_cast<double>(params.d)) / std::log(log_base);
  return -params.outer_factor() / (std::sqrt(static_cast<double>(params.n_terms)) * lg * lg);
}

ReferenceOptimum reference_optimum(const HardInstance& inst) {
  const Params& p = inst.params;
  const double lg = p.log_d();
  const double n = static_cast<double>(inst.n_terms());
  if (!(n * lg * lg > 1.0)) throw PreconditionViolated("reference_optimum needs N·log²d > 1");

  const Matrix basis = orthonormal_basis(Matrix(inst.a.transpose()));
  ReferenceOptimum ref;
  ref.projector_rank = static_cast<std::size_t>(basis.cols());

  Vector sum = Vector::Zero(inst.dim());
  for (Eigen::Index i = 0; i < inst.nemirovski.rows(); ++i) {
    Vector v = inst.nemirovski.row(i).transpose();
    // Two passes keep the residual orthogonal to row(A) to working precision.
    for (int pass = 0; pass < 2; ++pass) v -= basis * (basis.transpose() * v);
    sum += v;
  }
  Vector x = -sum / (std::sqrt(n) * lg);
  for (int pass = 0; pass < 2; ++pass) x -= basis * (basis.transpose() * x);
  ref.raw_norm = x.norm();
  if (ref.raw_norm > 1.0) {
    ref.norm_event = false;
    x /= ref.raw_norm;
    if (x.norm() > 1.0) x /= x.norm() * (1.0 + 1e-15);
  }
  ref.point = std::move(x);
  ref.value = eval_f(inst, ref.point).value;
  return ref;
}

OrderingResult check_ordering(const CorrelationTimes& times) {
  for (std::size_t i = 1; i < times.times.size(); ++i) {
    if (times.times[i] < times.times[i - 1]) return {false, i + 1};
  }
  return {true, std::nullopt};
}

bool gap_event(const CorrelationTimes& times, std::size_t i, std::size_t t_budget,
               std::size_t n_rows) {
  const std::size_t ti = times.times.at(i - 1);
  const std::size_t tn = times.times.at(i);
  if (!(ti <= tn && tn <= t_budget)) return false;
  return 2 * (tn - ti) <= n_rows;
}

GapIndexResult gap_index(const std::vector<CorrelationTimes>& trials, std::size_t t_budget,
                         std::size_t n_rows) {
  if (trials.empty()) throw PreconditionViolated("gap_index needs at least one trial");
  const std::size_t n_terms = trials.front().times.size();
  if (n_terms < 2) throw PreconditionViolated("gap_index needs N ≥ 2");
  GapIndexResult result;
  result.rates.assign(n_terms - 1, 0.0);
  for (const CorrelationTimes& trial : trials) {
    if (trial.times.size() != n_terms) throw PreconditionViolated("trials disagree on N");
    for (std::size_t i = 1; i < n_terms; ++i) {
      if (gap_event(trial, i, t_budget, n_rows)) result.rates[i - 1] += 1.0;
    }
  }
  for (double& r : result.rates) r /= static_cast<double>(trials.size());
  const auto best = std::max_element(result.rates.begin(), result.rates.end());
  result.i_star = static_cast<std::size_t>(best - result.rates.begin()) + 1;
  result.success_rate = *best;
  return result;
}

EpsilonSuccess epsilon_success(const Transcript& transcript, const HardInstance& inst,
                               const ReferenceOptimum& ref) {
  if (!transcript.instance.matches(inst)) {
    throw InstanceMismatch("transcript was not produced against this instance");
  }
  const double value = eval_f(inst, transcript.final_output).value;
  EpsilonSuccess out;
  out.gap = value - ref.value;
  out.success = out.gap <= inst.params.eps;
  return out;
}

}  // namespace memlb
