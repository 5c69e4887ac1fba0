#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "memlb/linalg.hpp"

namespace memlb {

enum class Profile : std::uint8_t { Paper = 0, DeskScale = 1 };

std::string to_string(Profile p);
Profile profile_from_string(const std::string& name);

/// Desk-scale replacements for the asymptotic schedule. Unset fields fall back
/// to the defaults documented on derive_params.
struct DeskScaleOverrides {
  std::optional<double> l_scale;
  std::optional<double> gamma;
  std::optional<std::int64_t> n_terms;
  std::optional<double> s_corr;
  std::optional<std::int64_t> k_msg;
  std::optional<std::int64_t> n_rows;
};

/// Full parameter pack of the hard function family
///   F(x) = 1/(√d L) · max{ L‖Ax‖∞ − 1, max_i ⟨v_i, x⟩ − iγ }.
struct Params {
  Profile profile = Profile::DeskScale;
  int d = 0;
  double delta = 0.0;
  double gamma = 0.0;
  std::int64_t n_terms = 0;
  /// ln L. Kept alongside l_scale because the asymptotic L = exp(log⁵ d)
  /// overflows doubles for moderate d.
  double log_l_scale = 0.0;
  double l_scale = 0.0;
  double s_corr = 0.0;
  std::int64_t k_msg = 0;
  std::int64_t n_rows = 0;
  double xi = 0.0;
  double xi_prime = 0.0;
  double eps = 0.0;
  double log_base = 2.0;

  /// log_{log_base}(d).
  double log_d() const;
  /// 1/(√d L), the factor applied after the inner max.
  double outer_factor() const;
  /// Finite L and ε > 0; required for sampling and evaluation.
  bool evaluable() const;

  friend bool operator==(const Params&, const Params&) = default;
};

/// Builds a parameter pack.
///
/// The Paper profile applies γ = log²d/d^{δ/4}, N = d^{δ/6}/log⁴d, L = exp(log⁵d),
/// s = d^{1−δ/2}·log²d, k = d^{1−δ}, n = 40T/N with T = d^{1+δ/6}.
/// DeskScale uses the same formulas except L (default d³), s (default
/// d·(γ/4)², the largest target for which γ/4 ≥ √(s/d)) and any override.
/// ξ = 2/L, ξ′ = √d·ξ and ε = 1/(d²L) are always derived. Integer fields are
/// rounded to nearest; N is clamped to ≥ 2, k and n to ≥ 1.
///
/// Throws NonEvenDimension, DeltaOutOfRange, OverrideViolatesInvariant.
Params derive_params(int d, double delta, Profile profile, const DeskScaleOverrides& overrides = {},
                     double log_base = 2.0);

/// Checks every Params invariant; throws OverrideViolatesInvariant on failure.
void validate(const Params& params);

/// Which term attains the inner max. Indices are 1-based (the Nemirovski index
/// is the multiplier of γ).
struct Term {
  enum class Kind : std::uint8_t { Row, Nem };
  Kind kind = Kind::Nem;
  std::size_t index = 1;
  int sign = 1;  // ±1 for rows; always +1 for Nemirovski terms

  static Term row(std::size_t j, int s) { return {Kind::Row, j, s}; }
  static Term nem(std::size_t i) { return {Kind::Nem, i, 1}; }
  bool is_row() const { return kind == Kind::Row; }

  std::string to_string() const;
  static Term parse(const std::string& text);

  friend bool operator==(const Term&, const Term&) = default;
};

struct HardInstance {
  Params params;
  RowMatrix a;           // (d/2) × d, entries ±1
  RowMatrix nemirovski;  // N × d, entries ±1/√d
  std::uint64_t seed = 0;

  int dim() const { return params.d; }
  std::size_t n_terms() const { return static_cast<std::size_t>(nemirovski.rows()); }
  std::size_t n_rows_a() const { return static_cast<std::size_t>(a.rows()); }

  /// FNV-1a over params, seed and every stored entry; identifies the instance
  /// in transcripts even when two instances share a seed.
  std::uint64_t digest() const;
};

/// Draws A and v_1..v_N i.i.d. uniform signs from Rng(seed), A first, row-major.
HardInstance sample_instance(const Params& params, std::uint64_t seed);

/// Replaces Nemirovski vector `index` (1-based) and returns the modified copy.
HardInstance with_nemirovski(const HardInstance& inst, std::size_t index, const Vector& v);

struct EvalResult {
  double value = 0.0;
  Term achieving_term;
  /// Inner (unscaled) term values: row j as +, row j as −, then v_1..v_N.
  std::optional<std::vector<double>> raw_terms;
};

/// Shared arithmetic of the inner max. eval_f, the first-order oracle and the
/// protocol simulation all call these so equal inputs give equal bits.
namespace kernel {

inline double row_inner(double l_scale, double abs_inner_product) {
  return l_scale * abs_inner_product - 1.0;
}

struct RowMax {
  double abs_ip = 0.0;    // max_j |⟨a_j, x⟩|
  std::size_t index = 1;  // smallest maximizing j, 1-based
  int sign = 1;           // sign of ⟨a_j, x⟩, + at zero
};
RowMax row_max(const RowMatrix& a, const Vector& x);

struct NemMax {
  double inner = 0.0;
  std::size_t index = 1;  // smallest maximizing i, 1-based
};
NemMax nemirovski_max(const RowMatrix& nemirovski, double gamma, const Vector& x);

struct InnerMax {
  double inner = 0.0;
  Term term;
};
/// Rows win ties against Nemirovski terms.
InnerMax inner_max(const HardInstance& inst, const Vector& x);

}  // namespace kernel

inline constexpr double kBallTolerance = 1e-12;

/// Throws NormTooLarge when ‖x‖₂ > 1 + 1e-12.
void require_in_ball(const Vector& x);

EvalResult eval_f(const HardInstance& inst, const Vector& x, bool with_raw_terms = false);

}  // namespace memlb
