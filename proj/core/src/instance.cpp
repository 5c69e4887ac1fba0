#include "memlb/instance.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "memlb/errors.hpp"
#include "memlb/rng.hpp"

namespace memlb {

namespace {

std::int64_t round_at_least(double value, std::int64_t floor) {
  if (!std::isfinite(value)) return floor;
  const double r = std::nearbyint(value);
  if (r < static_cast<double>(floor)) return floor;
  if (r > 9.0e18) return std::numeric_limits<std::int64_t>::max();
  return static_cast<std::int64_t>(r);
}

void derive_tolerances(Params& p) {
  // ξ = 2/L, ε = 1/(d²L), in log space so the Paper-profile L underflows cleanly.
  p.l_scale = std::exp(p.log_l_scale);
  p.xi = 2.0 * std::exp(-p.log_l_scale);
  p.xi_prime = std::sqrt(static_cast<double>(p.d)) * p.xi;
  p.eps = std::exp(-2.0 * std::log(static_cast<double>(p.d)) - p.log_l_scale);
}

}  // namespace

std::string to_string(Profile p) { return p == Profile::Paper ? "paper" : "desk"; }

Profile profile_from_string(const std::string& name) {
  if (name == "paper") return Profile::Paper;
  if (name == "desk" || name == "deskscale" || name == "DeskScale") return Profile::DeskScale;
  throw ConfigError("unknown profile '" + name + "' (expected paper|desk)");
}

double Params::log_d() const { return std::log(static_cast<double>(d)) / std::log(log_base); }

double Params::outer_factor() const {
  return 1.0 / (std::sqrt(static_cast<double>(d)) * l_scale);
}

bool Params::evaluable() const { return std::isfinite(l_scale) && l_scale >= 1.0 && eps > 0.0; }

Params derive_params(int d, double delta, Profile profile, const DeskScaleOverrides& ov,
                     double log_base) {
  if (d < 4 || d % 2 != 0) {
    throw NonEvenDimension("dimension must be even and ≥ 4, got " + std::to_string(d));
  }
  if (!(delta > 0.0 && delta <= 1.0)) {
    throw DeltaOutOfRange("delta must lie in (0, 1], got " + std::to_string(delta));
  }
  if (!(log_base > 1.0)) throw OverrideViolatesInvariant("log base must exceed 1");

  Params p;
  p.profile = profile;
  p.d = d;
  p.delta = delta;
  p.log_base = log_base;

  const double dd = static_cast<double>(d);
  const double lg = p.log_d();
  const double t_queries = std::pow(dd, 1.0 + delta / 6.0);

  p.gamma = lg * lg / std::pow(dd, delta / 4.0);
  p.n_terms = round_at_least(std::pow(dd, delta / 6.0) / std::pow(lg, 4), 2);
  p.k_msg = round_at_least(std::pow(dd, 1.0 - delta), 1);

  if (profile == Profile::Paper) {
    p.log_l_scale = std::pow(lg, 5);
    p.s_corr = std::pow(dd, 1.0 - delta / 2.0) * lg * lg;
    p.n_rows = round_at_least(40.0 * t_queries / static_cast<double>(p.n_terms), 1);
    derive_tolerances(p);
    return p;
  }

  if (ov.gamma) p.gamma = *ov.gamma;
  if (ov.n_terms) p.n_terms = *ov.n_terms;
  if (ov.k_msg) p.k_msg = *ov.k_msg;
  const double l_scale = ov.l_scale ? *ov.l_scale : dd * dd * dd;
  if (!(l_scale >= 1.0) || !std::isfinite(l_scale)) {
    throw OverrideViolatesInvariant("L must be finite and ≥ 1");
  }
  p.log_l_scale = std::log(l_scale);
  p.s_corr = ov.s_corr ? *ov.s_corr : dd * (p.gamma / 4.0) * (p.gamma / 4.0);
  p.n_rows = ov.n_rows ? *ov.n_rows
                       : round_at_least(40.0 * t_queries / static_cast<double>(p.n_terms), 1);
  derive_tolerances(p);
  // exp(log L) may differ from the override by an ulp; keep the requested value.
  p.l_scale = l_scale;
  validate(p);
  return p;
}

void validate(const Params& p) {
  auto fail = [](const std::string& what) { throw OverrideViolatesInvariant(what); };
  if (p.d < 4 || p.d % 2 != 0) throw NonEvenDimension("dimension must be even and ≥ 4");
  if (!(p.delta > 0.0 && p.delta <= 1.0)) throw DeltaOutOfRange("delta must lie in (0, 1]");
  if (!(p.gamma > 0.0) || !std::isfinite(p.gamma)) fail("gamma must be positive");
  if (p.n_terms < 2) fail("N must be ≥ 2");
  if (!(p.l_scale >= 1.0)) fail("L must be ≥ 1");
  if (!(p.s_corr > 0.0)) fail("s must be positive");
  if (p.k_msg < 1) fail("k must be ≥ 1");
  if (p.n_rows < 1) fail("n must be ≥ 1");
  if (!(p.eps > 0.0)) fail("eps must be positive");
  const double expected = std::sqrt(static_cast<double>(p.d)) * p.xi;
  if (std::abs(p.xi_prime - expected) > 1e-12 * std::max(1.0, expected)) {
    fail("xi_prime must equal sqrt(d)·xi");
  }
}

std::string Term::to_string() const {
  if (kind == Kind::Row) return "row(" + std::to_string(index) + (sign > 0 ? ",+)" : ",-)");
  return "nem(" + std::to_string(index) + ")";
}

Term Term::parse(const std::string& text) {
  std::size_t index = 0;
  char sign_char = 0;
  if (std::sscanf(text.c_str(), "row(%zu,%c)", &index, &sign_char) == 2 && index >= 1 &&
      (sign_char == '+' || sign_char == '-')) {
    return Term::row(index, sign_char == '+' ? 1 : -1);
  }
  if (std::sscanf(text.c_str(), "nem(%zu)", &index) == 1 && index >= 1) return Term::nem(index);
  throw FormatError("cannot parse term tag '" + text + "'");
}

std::uint64_t HardInstance::digest() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](std::uint64_t word) {
    for (int b = 0; b < 8; ++b) {
      h ^= (word >> (8 * b)) & 0xffu;
      h *= 0x100000001b3ULL;
    }
  };
  feed(static_cast<std::uint64_t>(params.d));
  for (double f : {params.delta, params.gamma, params.l_scale, params.s_corr, params.xi,
                   params.eps, params.log_base}) {
    feed(std::bit_cast<std::uint64_t>(f));
  }
  feed(static_cast<std::uint64_t>(params.n_terms));
  feed(static_cast<std::uint64_t>(params.k_msg));
  feed(static_cast<std::uint64_t>(params.n_rows));
  feed(seed);
  for (Eigen::Index i = 0; i < a.size(); ++i) feed(a.data()[i] > 0 ? 1 : 0);
  for (Eigen::Index i = 0; i < nemirovski.size(); ++i) feed(nemirovski.data()[i] > 0 ? 1 : 0);
  return h;
}

HardInstance sample_instance(const Params& params, std::uint64_t seed) {
  validate(params);
  if (!params.evaluable()) {
    throw OverrideViolatesInvariant("instance sampling needs a finite L (use the desk profile)");
  }
  HardInstance inst;
  inst.params = params;
  inst.seed = seed;
  const Eigen::Index d = params.d;
  inst.a.resize(d / 2, d);
  inst.nemirovski.resize(params.n_terms, d);
  Rng rng(seed);
  for (Eigen::Index i = 0; i < inst.a.size(); ++i) inst.a.data()[i] = rng.sign();
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  for (Eigen::Index i = 0; i < inst.nemirovski.size(); ++i) {
    inst.nemirovski.data()[i] = rng.sign() * scale;
  }
  return inst;
}

HardInstance with_nemirovski(const HardInstance& inst, std::size_t index, const Vector& v) {
  if (index < 1 || index > inst.n_terms() || v.size() != inst.dim()) {
    throw PreconditionViolated("with_nemirovski: index or dimension out of range");
  }
  HardInstance out = inst;
  out.nemirovski.row(static_cast<Eigen::Index>(index - 1)) = v.transpose();
  return out;
}

namespace kernel {

RowMax row_max(const RowMatrix& a, const Vector& x) {
  RowMax best;
  best.abs_ip = -1.0;
  const auto n = static_cast<std::size_t>(x.size());
  for (Eigen::Index j = 0; j < a.rows(); ++j) {
    const double ip = dot_ordered(a.row(j).data(), x.data(), n);
    const double mag = std::abs(ip);
    if (mag > best.abs_ip) {
      best.abs_ip = mag;
      best.index = static_cast<std::size_t>(j) + 1;
      best.sign = ip < 0.0 ? -1 : 1;
    }
  }
  if (best.abs_ip < 0.0) best.abs_ip = 0.0;
  return best;
}

NemMax nemirovski_max(const RowMatrix& v, double gamma, const Vector& x) {
  NemMax best;
  best.inner = -std::numeric_limits<double>::infinity();
  const auto n = static_cast<std::size_t>(x.size());
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    const double term =
        dot_ordered(v.row(i).data(), x.data(), n) - static_cast<double>(i + 1) * gamma;
    if (term > best.inner) {
      best.inner = term;
      best.index = static_cast<std::size_t>(i) + 1;
    }
  }
  return best;
}

InnerMax inner_max(const HardInstance& inst, const Vector& x) {
  const RowMax rows = row_max(inst.a, x);
  const double row_value = row_inner(inst.params.l_scale, rows.abs_ip);
  const NemMax nem = nemirovski_max(inst.nemirovski, inst.params.gamma, x);
  if (row_value >= nem.inner) return {row_value, Term::row(rows.index, rows.sign)};
  return {nem.inner, Term::nem(nem.index)};
}

}  // namespace kernel

void require_in_ball(const Vector& x) {
  const double n = x.norm();
  if (!(n <= 1.0 + kBallTolerance)) {
    std::ostringstream msg;
    msg << "query norm " << n << " exceeds 1 + 1e-12";
    throw NormTooLarge(msg.str());
  }
}

EvalResult eval_f(const HardInstance& inst, const Vector& x, bool with_raw_terms) {
  if (x.size() != inst.dim()) throw PreconditionViolated("eval_f: dimension mismatch");
  require_in_ball(x);
  const kernel::InnerMax m = kernel::inner_max(inst, x);
  EvalResult result{inst.params.outer_factor() * m.inner, m.term, std::nullopt};
  if (with_raw_terms) {
    std::vector<double> raw;
    raw.reserve(2 * inst.n_rows_a() + inst.n_terms());
    const double l = inst.params.l_scale;
    for (Eigen::Index j = 0; j < inst.a.rows(); ++j) {
      const double ip = inst.a.row(j).dot(x);
      raw.push_back(l * ip - 1.0);
      raw.push_back(-l * ip - 1.0);
    }
    for (Eigen::Index i = 0; i < inst.nemirovski.rows(); ++i) {
      raw.push_back(inst.nemirovski.row(i).dot(x) - static_cast<double>(i + 1) * inst.params.gamma);
    }
    result.raw_terms = std::move(raw);
  }
  return result;
}

}  // namespace memlb
