#include <cmath>

#include "memlb/errors.hpp"
#include "memlb/game.hpp"
#include "memlb/instrument.hpp"
#include "memlb/oracle.hpp"
#include "memlb/rng.hpp"

namespace memlb {

ReductionProtocol::ReductionProtocol(AlgorithmPtr alg, std::size_t i_star, const GameParams& gp,
                                     const Params& params, std::uint64_t shared_seed, std::size_t t_budget)
    : alg_(std::move(alg)),
      i_star_(i_star),
      gp_(gp),
      params_(params),
      shared_seed_(shared_seed),
      t_budget_(t_budget),
      alg_seed_(derive_seed(shared_seed, stream::kAlgorithm, 0)) {
  if (!alg_) throw PreconditionViolated("reduce needs an algorithm");
  if (!params_.evaluable()) throw PreconditionViolated("reduce needs finite L");
  if (params_.d != gp_.d || alg_->dim() != gp_.d) throw PreconditionViolated("dimensions of game, params and algorithm differ");
  if (alg_->declared_size() != gp_.message_bits()) {
    throw MessageLengthViolation("algorithm state is " + std::to_string(alg_->declared_size()) +
                                 " bits but the game allows k·d = " + std::to_string(gp_.message_bits()));
  }
  if (i_star_ < 1 || i_star_ + 1 > static_cast<std::size_t>(params_.n_terms)) {
    throw PreconditionViolated("i_star must lie in [1, N−1]");
  }
  if (t_budget_ < 1) throw PreconditionViolated("t_budget must be ≥ 1");
  // Public randomness: both players expand the shared seed the same way.
  Rng rng(derive_seed(shared_seed, stream::kPublic, 0));
  const double scale = 1.0 / std::sqrt(static_cast<double>(gp_.d));
  public_v_.resize(static_cast<Eigen::Index>(params_.n_terms), gp_.d);
  for (Eigen::Index i = 0; i < public_v_.rows(); ++i) {
    for (Eigen::Index c = 0; c < public_v_.cols(); ++c) public_v_(i, c) = rng.sign() * scale;
  }
}

HardInstance ReductionProtocol::instance(const RowMatrix& a, const Vector* planted) const {
  HardInstance inst;
  inst.params = params_;
  inst.a = a;
  inst.nemirovski = public_v_;
  inst.seed = shared_seed_;
  if (planted) inst.nemirovski.row(static_cast<Eigen::Index>(i_star_)) = planted->transpose();
  return inst;
}

ReductionProtocol::Round1 ReductionProtocol::find_correlation_time(const HardInstance& inst) const {
  CorrelationTracker tracker(inst);
  MemoryState m = alg_->init(alg_seed_);
  for (std::size_t round = 1; round <= t_budget_; ++round) {
    const Vector x = alg_->query(m);
    tracker.observe(x, round);
    if (tracker.time(i_star_) != kInfiniteTime) return {round, m};
    if (alg_->halted(m)) break;
    const OracleAnswer ans = first_order(inst, x);
    m = alg_->update(m, ans.value, ans.subgradient);
  }
  return {kInfiniteTime, {}};
}

BitString ReductionProtocol::alice_round1(const RowMatrix& a) const {
  const Round1 r = find_correlation_time(instance(a, nullptr));
  if (r.t_istar == kInfiniteTime) return BitString(gp_.message_bits());
  return r.state;
}

RowList ReductionProtocol::alice_round3(const RowMatrix& a, const Vector& v) const {
  RowList rows(static_cast<std::size_t>(gp_.n_rows));
  const Round1 r = find_correlation_time(instance(a, nullptr));
  if (r.t_istar == kInfiniteTime) return rows;
  const HardInstance planted = instance(a, &v);
  const std::size_t last = r.t_istar + rows.size() - 1;
  MemoryState m = alg_->init(alg_seed_);
  for (std::size_t round = 1; round <= last; ++round) {
    const Vector x = alg_->query(m);
    const OracleAnswer ans = first_order(planted, x);
    if (round >= r.t_istar && ans.provenance.is_row()) {
      rows[round - r.t_istar] = a.row(static_cast<Eigen::Index>(ans.provenance.index - 1)).transpose();
    }
    if (alg_->halted(m)) break;
    m = alg_->update(m, ans.value, ans.subgradient);
  }
  return rows;
}

std::vector<Vector> ReductionProtocol::simulate_bob(const BitString& m, const Vector& v, const RowList& rows,
                                                    std::size_t* picked, std::vector<double>* values) const {
  // Bob knows V′ but not A; a one-row instance reproduces the oracle's row arithmetic.
  HardInstance known;
  known.params = params_;
  known.nemirovski = public_v_;
  known.nemirovski.row(static_cast<Eigen::Index>(i_star_)) = v.transpose();
  known.a.resize(1, gp_.d);
  const double outer = params_.outer_factor();
  const double corr = params_.gamma / 4.0;

  std::vector<Vector> queries;
  *picked = 0;
  try {
    MemoryState state = m;
    for (std::size_t j = 0; j < rows.size(); ++j) {
      Vector x = alg_->query(state);
      double value = 0.0;
      Vector g;
      if (rows[j]) {
        known.a.row(0) = rows[j]->transpose();
        const kernel::RowMax rm = kernel::row_max(known.a, x);
        value = outer * kernel::row_inner(params_.l_scale, rm.abs_ip);
        g = subgradient_for(known, Term::row(1, rm.sign));
      } else {
        const kernel::NemMax nm = kernel::nemirovski_max(known.nemirovski, params_.gamma, x);
        value = outer * nm.inner;
        g = subgradient_for(known, Term::nem(nm.index));
      }
      if (values) values->push_back(value);
      const bool pass = std::abs(dot_ordered(v, x)) >= corr && value <= outer;
      queries.push_back(std::move(x));
      if (pass && *picked == 0) {
        *picked = j + 1;
        if (!values) break;
      }
      if (alg_->halted(state)) break;
      state = alg_->update(state, value, g);
    }
  } catch (const Error&) {
    // A garbage state (e.g. the all-zero message) can make the algorithm fail;
    // Bob then keeps whatever he picked so far.
  }
  return queries;
}

Vector ReductionProtocol::bob_output(const BitString& m, const Vector& v, const RowList& rows) const {
  std::size_t picked = 0;
  const std::vector<Vector> queries = simulate_bob(m, v, rows, &picked, nullptr);
  if (picked == 0) return Vector::Zero(gp_.d);
  return queries[picked - 1];
}

ReductionProtocol::Trace ReductionProtocol::trace(const RowMatrix& a, const Vector& v) const {
  Trace t;
  const HardInstance base = instance(a, nullptr);
  const HardInstance planted = instance(a, &v);
  const Round1 r = find_correlation_time(base);
  t.t_istar = r.t_istar;
  const BitString m = r.t_istar == kInfiniteTime ? BitString(gp_.message_bits()) : r.state;
  t.message_bits = m.size();
  const RowList rows = alice_round3(a, v);

  std::vector<double> bob_values;
  const std::vector<Vector> bob = simulate_bob(m, v, rows, &t.bob_round, &bob_values);
  t.bob_output = t.bob_round == 0 ? Vector::Zero(gp_.d) : bob[t.bob_round - 1];
  if (r.t_istar == kInfiniteTime) return t;

  // Alice's real F_{A,V′} run, compared with the F_{A,V} run on the prefix and
  // with Bob's simulation on the window.
  const std::size_t window = rows.size();
  MemoryState mv = alg_->init(alg_seed_);
  MemoryState mp = alg_->init(alg_seed_);
  t.prefix_agrees = true;
  const double outer = params_.outer_factor();
  for (std::size_t round = 1; round < r.t_istar + window; ++round) {
    const Vector xp = alg_->query(mp);
    const OracleAnswer ap = first_order(planted, xp);
    if (round < r.t_istar) {
      const Vector xv = alg_->query(mv);
      if (xv != xp) t.prefix_agrees = false;
      const OracleAnswer av = first_order(base, xv);
      mv = alg_->update(mv, av.value, av.subgradient);
    } else {
      const std::size_t j = round - r.t_istar;
      if (j >= bob.size() || bob[j] != xp) {
        ++t.mismatch_rounds;
      } else if (bob_values[j] != ap.value) {
        ++t.answer_mismatches;
      }
      if (t.true_filter_round == 0 && std::abs(dot_ordered(v, xp)) >= params_.gamma / 4.0 && ap.value <= outer) {
        t.true_filter_round = j + 1;
      }
    }
    if (alg_->halted(mp)) {
      t.mismatch_rounds += r.t_istar + window - 1 - round;
      break;
    }
    mp = alg_->update(mp, ap.value, ap.subgradient);
  }
  return t;
}

std::shared_ptr<const ReductionProtocol> reduce(AlgorithmPtr alg, std::size_t i_star, const GameParams& gp,
                                                const Params& params, std::uint64_t shared_seed,
                                                std::size_t t_budget) {
  return std::make_shared<ReductionProtocol>(std::move(alg), i_star, gp, params, shared_seed, t_budget);
}

}  // namespace memlb
