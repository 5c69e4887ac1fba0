#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "memlb/bits.hpp"
#include "memlb/game.hpp"
#include "memlb/linalg.hpp"
#include "memlb/stats.hpp"

namespace memlb {

/// Level parameters of the iterative encoding. Index h runs over 0..H.
/// Counts that overflow doubles are stored as exponents.
struct LevelSchedule {
  int d = 0;
  double s = 0.0;
  std::int64_t k = 0;
  std::int64_t n = 0;
  double log_base = 2.0;

  double delta_cap = 0.0;  // Δ = d/n
  int levels = 0;          // H
  bool levels_overridden = false;
  /// s_h = (s/log²d)·(Δ/log⁵d)^h for h < H, s_H = d/10.
  std::vector<double> s_h;
  std::vector<std::int64_t> s_h_rounded;
  /// s_{≤h} = s_1 + … + s_h (s_0 excluded), s_{≤0} = 0.
  std::vector<double> s_leq;
  /// log_d α_h = −8^{h+1}.
  std::vector<double> alpha_exp;
  /// log₂ Γ_h = s_h·d − 2kd.
  std::vector<double> gamma_exp;
  /// log₂ N_h = s_h / log d.
  std::vector<double> cover_exp;
  /// L_seq = s/(4 log⁸ d).
  double l_seq = 0.0;
};

/// Throws DegenerateSchedule when Δ < 1, s₀ < 1, or H would be 0 or undefined
/// (the growth ratio Δ/log⁵d ≤ 1 never reaches d/10). `levels` forces H.
LevelSchedule level_schedule(int d, double s, std::int64_t k, std::int64_t n, double log_base = 2.0,
                             std::optional<int> levels = std::nullopt);

/// Bob's outputs for one message against every (v, row tuple) combination.
/// Row tuples hold 0 for nil and j for row j (1-based) of the base matrix.
struct TableEntry {
  std::size_t v_index = 0;
  std::vector<std::size_t> rows;
  Vector x;
};

struct Table {
  std::vector<TableEntry> entries;
  BitString message;
  std::size_t base_rows = 0;
  std::size_t n_rows = 0;
};

inline constexpr std::uint64_t kDefaultEnumerationCap = 1000000;

/// Enumerates v in order, then tuples lexicographically (first slot most
/// significant). Throws EnumerationCapExceeded when |V|·(m+1)^n > cap.
Table build_table(const Protocol& proto, const BitString& m, const RowMatrix& b, const std::vector<Vector>& vs,
                  std::size_t n_rows, std::uint64_t cap = kDefaultEnumerationCap);

/// Number of distinct output vectors in the table.
std::size_t distinct_outputs(const Table& table);

/// Indices of entries with ‖Bx‖∞ ≤ xi_prime, in table order.
std::vector<std::size_t> orthogonal_entries(const Table& table, const RowMatrix& b, double xi_prime);

/// Sign row for code c: coordinate i is +1 when bit i of c is set.
Vector sign_row(std::uint64_t code, int d);

struct BlockCount {
  bool exact = true;
  /// Sign rows passing every constraint (exact) or its estimate (Monte Carlo).
  double row_count = 0.0;
  /// log₂ of the number of s_rows × d matrices, i.e. s_rows·log₂(row_count).
  double log2_count = 0.0;
  /// Exact count when it fits in 64 bits.
  std::optional<std::uint64_t> count;
  /// Monte Carlo only: interval for the per-row pass probability.
  Interval row_fraction_ci;
  std::vector<RowMatrix> sample_members;
};

enum class CountMode : std::uint8_t { Auto, Exact, MonteCarlo };

/// Counts sign matrices in {−1,1}^{s_rows×d} whose rows are all ξ′-orthogonal
/// to every x. Rows are independent, so the count is (passing rows)^{s_rows}.
/// Exact mode needs 2^{s_rows·d} ≤ cap (throws CapExceeded otherwise); Auto
/// falls back to Monte Carlo with `samples` random rows.
BlockCount orth_block_count(const std::vector<Vector>& xs, int s_rows, int d, double xi_prime,
                            std::uint64_t cap = std::uint64_t{1} << 20, CountMode mode = CountMode::Auto,
                            std::uint64_t samples = 100000, std::uint64_t seed = 0);

/// Row partition P = (P1, P2, P3) of [d/2], 0-based, each part sorted.
struct Partition {
  std::vector<std::size_t> p1, p2, p3;
  friend bool operator==(const Partition&, const Partition&) = default;
};

/// [A1, A2, A3]_P: row j of A_τ goes to row P_τ(j).
RowMatrix assemble(const Partition& p, const RowMatrix& a1, const RowMatrix& a2, const RowMatrix& a3);

struct Decomposed {
  RowMatrix a1, a2, a3;
};
Decomposed decompose(const RowMatrix& a, const Partition& p);

/// All partitions with |P2| = s2, |P3| = s3, enumerated by (P2, P3) in
/// lexicographic order of index sets.
std::vector<Partition> partitions(std::size_t rows, std::size_t s2, std::size_t s3);

struct MicroConfig {
  int d = 6;
  std::int64_t k = 1;
  std::int64_t n = 1;
  /// s_1, the rows placed in P2 at the single level.
  int s_rows = 1;
  /// Length of the RLI sequences scanned.
  std::size_t l_seq = 1;
  std::size_t v_count = 2;
  /// Messages are the distinct outputs of alice_round1 on this many sampled A.
  std::size_t message_samples = 8;
  /// Defaults to √d·2/d³ (ξ′ with L = d³).
  std::optional<double> xi_prime;
  std::uint64_t seed = 0;
  /// Cap on (message, A1) pairs and on RLI tuples per table.
  std::uint64_t cap = 10000000;
};

/// One (M, P, A1) whose 𝒮 passed the Γ test and was added to 𝒜.
struct EmittedSet {
  std::size_t message = 0;  // index into MicroResult::messages
  std::size_t partition = 0;
  std::uint64_t a1_code = 0;
  std::uint64_t s_size = 0;
  std::uint64_t j_size = 0;
  double gamma_exp = 0.0;
  /// Every assembled matrix, row-major sign bits (bit r·d + c set for +1).
  std::vector<std::uint64_t> members;
  /// The A2 codes in 𝒮.
  std::vector<std::uint64_t> s_members;
};

struct MicroCounters {
  std::uint64_t messages = 0;
  std::uint64_t partitions = 0;
  std::uint64_t a1_matrices = 0;
  std::uint64_t tables = 0;
  std::uint64_t table_entries = 0;
  std::uint64_t orthogonal_entries = 0;
  std::uint64_t unit_orthogonal_entries = 0;
  std::uint64_t tuples_checked = 0;
  std::uint64_t rli_sequences = 0;
  std::uint64_t nonempty_s = 0;
  std::uint64_t under_threshold = 0;
  std::uint64_t over_threshold = 0;
  std::uint64_t emitted_sets = 0;
  std::uint64_t a_size = 0;  // |𝒜| after the union
};

struct MicroResult {
  MicroConfig config;
  double xi_prime = 0.0;
  double rli_threshold = 0.0;  // α₀/4
  double gamma_exp = 0.0;      // log₂ Γ₁
  std::vector<BitString> messages;
  std::vector<Vector> vs;
  std::vector<Partition> parts;
  std::vector<EmittedSet> emitted;
  /// 𝒜₁ as sorted matrix codes.
  std::vector<std::uint64_t> a_set;
  MicroCounters counters;
  double seconds = 0.0;
};

/// Single-level run of the encoding loop at micro scale. The protocol must
/// already produce unit or zero outputs (see normalize_output); entries that
/// are not unit vectors cannot start an RLI sequence.
/// Throws PreconditionViolated (d > 8 or odd, s_rows ∉ [1, d/2]), CapExceeded.
MicroResult encode_micro(const Protocol& proto, const MicroConfig& cfg);

struct MicroCheck {
  std::uint64_t matrices_checked = 0;
  std::uint64_t decomposition_failures = 0;
  std::uint64_t membership_failures = 0;
  std::uint64_t counting_failures = 0;
  bool ok() const { return decomposition_failures == 0 && membership_failures == 0 && counting_failures == 0; }
};

/// Re-derives every emitted matrix from scratch: decomposes it by its
/// partition, rebuilds Bob's outputs by direct calls, re-tests RLI with
/// explicit projectors and checks A2 against the witness sequence; also checks
/// log₂|𝒥| ≤ log₂Γ + d·s_{≤0}.
MicroCheck recheck_micro(const Protocol& proto, const MicroResult& result);

/// Decodes a matrix code produced by encode_micro.
RowMatrix matrix_from_code(std::uint64_t code, int rows, int d);
std::uint64_t matrix_code(const RowMatrix& a);

std::string micro_report_text(const MicroResult& r, const MicroCheck& check);
/// Per-level counters: level, |𝒮| exponent, Γ exponent, verdict counts, |𝒥| exponent.
std::string micro_report_csv(const MicroResult& r);

}  // namespace memlb
