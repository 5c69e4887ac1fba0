#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "memlb/bits.hpp"
#include "memlb/instance.hpp"
#include "memlb/linalg.hpp"
#include "memlb/optimizer.hpp"
#include "memlb/stats.hpp"

namespace memlb {

/// Parameters of the correlated orthogonal vector game. Alice holds a
/// (d/2) × d sign matrix A, Bob a vector v with entries ±1/√d.
struct GameParams {
  int d = 0;
  std::int64_t k_msg = 1;
  std::int64_t n_rows = 1;
  double s_corr = 1.0;
  double xi = 0.0;

  std::size_t message_bits() const { return static_cast<std::size_t>(k_msg) * static_cast<std::size_t>(d); }
  /// √(s/d).
  double corr_threshold() const;

  static GameParams from(const Params& p);
  /// Same game with tolerance ξ′ = √d·ξ (the target of a normalized protocol).
  GameParams relaxed() const;
};

using RowEntry = std::optional<Vector>;
using RowList = std::vector<RowEntry>;

class Protocol {
 public:
  virtual ~Protocol() = default;
  virtual BitString alice_round1(const RowMatrix& a) const = 0;
  virtual RowList alice_round3(const RowMatrix& a, const Vector& v) const = 0;
  virtual Vector bob_output(const BitString& m, const Vector& v, const RowList& rows) const = 0;
};

using ProtocolPtr = std::shared_ptr<const Protocol>;

struct GameOutcome {
  bool orthogonal = false;  // ‖Ax‖∞ ≤ ξ
  bool correlated = false;  // |⟨v,x⟩| ≥ √(s/d)
  bool success = false;
  double abs_corr = 0.0;
  double orth_norm = 0.0;
  std::size_t message_bits = 0;
  std::size_t rows_sent = 0;
  Vector output;
};

/// Referee: drives the three rounds and checks the message length, row
/// membership and that Bob's output lies in the unit ball.
///
/// Throws PreconditionViolated on shape mismatch, MessageLengthViolation,
/// RowNotInMatrix, OutputOutOfBall.
GameOutcome play(const Protocol& proto, const RowMatrix& a, const Vector& v, const GameParams& gp);

/// Recomputes both predicates for `x` with plain Eigen arithmetic, sharing no
/// code with play().
GameOutcome recheck(const RowMatrix& a, const Vector& v, const Vector& x, const GameParams& gp);

/// Draws A (d/2 × d signs) then v (signs/√d) from one generator.
struct GameInput {
  RowMatrix a;
  Vector v;
};
GameInput sample_game_input(const GameParams& gp, std::uint64_t seed);

/// Bob's output x becomes e₁ when ‖x‖ < √(s/d) and x/‖x‖ otherwise. Play the
/// wrapped protocol against gp.relaxed().
ProtocolPtr normalize_output(ProtocolPtr proto, const GameParams& gp);

struct SuccessEstimate {
  std::uint64_t trials = 0;
  std::uint64_t successes = 0;
  double rate = 0.0;
  Interval ci95;
  std::vector<GameOutcome> outcomes;
  std::vector<std::uint64_t> trial_seeds;
};

/// Plays `trials` i.i.d. games; trial t uses derive_seed(seed, game, t).
SuccessEstimate estimate_success(const Protocol& proto, const GameParams& gp, std::uint64_t trials,
                                 std::uint64_t seed, unsigned jobs = 1);

/// Simple protocols, used as fixtures and baselines.
namespace protocols {
/// Sends zero bits and nil rows; Bob outputs 0.
ProtocolPtr zero(const GameParams& gp);
/// Bob outputs v itself.
ProtocolPtr echo(const GameParams& gp);
/// Alice sends the sign bits of the first k rows and the next n rows in
/// round 3; Bob outputs v with every known row projected out.
ProtocolPtr row_sketch(const GameParams& gp);
/// Same, but Bob projects v + shift instead of v. A generic shift keeps the
/// output off every sign row other than the known ones.
ProtocolPtr row_sketch(const GameParams& gp, const Vector& shift);
/// Sends a vector that is not a row of A in round 3.
ProtocolPtr cheating(const GameParams& gp);
}  // namespace protocols

/// Protocol built from a memory-bounded optimizer by simulating it on the hard
/// function with Bob's vector planted at index i_star + 1.
class ReductionProtocol : public Protocol {
 public:
  struct Trace {
    std::size_t t_istar = 0;  // kInfiniteTime when never reached
    std::size_t message_bits = 0;
    /// V and V′ runs issue identical queries through round t_istar − 1.
    bool prefix_agrees = false;
    /// Rounds in the window where Bob's simulated query differs from Alice's real one.
    std::size_t mismatch_rounds = 0;
    /// Rounds in the window where Bob's reconstructed answer differs from the true one.
    std::size_t answer_mismatches = 0;
    std::size_t bob_round = 0;  // 1-based window index of Bob's pick, 0 if none
    Vector bob_output;
    /// First window query passing the correlation test and true F ≤ 1/(√d L).
    std::size_t true_filter_round = 0;
  };

  ReductionProtocol(AlgorithmPtr alg, std::size_t i_star, const GameParams& gp, const Params& params,
                    std::uint64_t shared_seed, std::size_t t_budget);

  BitString alice_round1(const RowMatrix& a) const override;
  RowList alice_round3(const RowMatrix& a, const Vector& v) const override;
  Vector bob_output(const BitString& m, const Vector& v, const RowList& rows) const override;

  /// Plays both sides with full visibility and reports fidelity diagnostics.
  Trace trace(const RowMatrix& a, const Vector& v) const;

  /// The public Nemirovski vectors v_1..v_N.
  const RowMatrix& public_vectors() const noexcept { return public_v_; }
  /// The hard instance F_{A,V} (planted = nullptr) or F_{A,V′}.
  HardInstance instance(const RowMatrix& a, const Vector* planted) const;
  std::uint64_t algorithm_seed() const noexcept { return alg_seed_; }
  std::size_t i_star() const noexcept { return i_star_; }
  std::size_t t_budget() const noexcept { return t_budget_; }

 private:
  struct Round1 {
    std::size_t t_istar;
    MemoryState state;  // state after t_istar − 1 updates
  };
  Round1 find_correlation_time(const HardInstance& inst) const;
  std::vector<Vector> simulate_bob(const BitString& m, const Vector& v, const RowList& rows,
                                   std::size_t* picked, std::vector<double>* values) const;

  AlgorithmPtr alg_;
  std::size_t i_star_;
  GameParams gp_;
  Params params_;
  std::uint64_t shared_seed_;
  std::size_t t_budget_;
  std::uint64_t alg_seed_;
  RowMatrix public_v_;
};

/// Throws MessageLengthViolation when S ≠ k·d and PreconditionViolated when
/// i_star ∉ [1, N−1] or dimensions disagree.
std::shared_ptr<const ReductionProtocol> reduce(AlgorithmPtr alg, std::size_t i_star, const GameParams& gp,
                                                const Params& params, std::uint64_t shared_seed,
                                                std::size_t t_budget);

}  // namespace memlb
