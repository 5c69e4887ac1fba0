#include "memlb/game.hpp"

#include <algorithm>
#include <cmath>

#include "memlb/errors.hpp"
#include "memlb/parallel.hpp"
#include "memlb/rng.hpp"

namespace memlb {

double GameParams::corr_threshold() const { return std::sqrt(s_corr / static_cast<double>(d)); }

GameParams GameParams::from(const Params& p) { return {p.d, p.k_msg, p.n_rows, p.s_corr, p.xi}; }

GameParams GameParams::relaxed() const {
  GameParams out = *this;
  out.xi = std::sqrt(static_cast<double>(d)) * xi;
  return out;
}

namespace {

bool is_row_of(const RowMatrix& a, const Vector& row) {
  if (row.size() != a.cols()) return false;
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    bool same = true;
    for (Eigen::Index c = 0; c < a.cols() && same; ++c) same = a(r, c) == row[c];
    if (same) return true;
  }
  return false;
}

void check_shapes(const RowMatrix& a, const Vector& v, const GameParams& gp) {
  if (gp.d < 2 || gp.d % 2 != 0) throw PreconditionViolated("game dimension must be even");
  if (a.rows() != gp.d / 2 || a.cols() != gp.d) throw PreconditionViolated("A must be (d/2) × d");
  if (v.size() != gp.d) throw PreconditionViolated("v must have d entries");
}

}  // namespace

GameOutcome play(const Protocol& proto, const RowMatrix& a, const Vector& v, const GameParams& gp) {
  check_shapes(a, v, gp);
  const BitString m = proto.alice_round1(a);
  if (m.size() != gp.message_bits()) {
    throw MessageLengthViolation("round-1 message has " + std::to_string(m.size()) + " bits, expected " +
                                 std::to_string(gp.message_bits()));
  }
  const RowList rows = proto.alice_round3(a, v);
  if (rows.size() != static_cast<std::size_t>(gp.n_rows)) {
    throw MessageLengthViolation("round-3 message has " + std::to_string(rows.size()) + " entries, expected " +
                                 std::to_string(gp.n_rows));
  }
  std::size_t sent = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i]) continue;
    if (!is_row_of(a, *rows[i])) throw RowNotInMatrix("round-3 entry " + std::to_string(i + 1) + " is not a row of A");
    ++sent;
  }
  Vector x = proto.bob_output(m, v, rows);
  if (x.size() != gp.d || !std::isfinite(x.norm()) || x.norm() > 1.0 + kBallTolerance) {
    throw OutputOutOfBall("Bob's output is not in the unit ball");
  }
  GameOutcome out;
  out.orth_norm = row_infinity_norm(a, x);
  out.abs_corr = std::abs(dot_ordered(v, x));
  out.orthogonal = out.orth_norm <= gp.xi;
  out.correlated = out.abs_corr >= gp.corr_threshold();
  out.success = out.orthogonal && out.correlated;
  out.message_bits = m.size();
  out.rows_sent = sent;
  out.output = std::move(x);
  return out;
}

GameOutcome recheck(const RowMatrix& a, const Vector& v, const Vector& x, const GameParams& gp) {
  GameOutcome out;
  const Matrix dense = a;
  out.orth_norm = (dense * x).cwiseAbs().maxCoeff();
  out.abs_corr = std::abs(v.dot(x));
  out.orthogonal = out.orth_norm <= gp.xi;
  out.correlated = out.abs_corr * out.abs_corr >= gp.s_corr / static_cast<double>(gp.d);
  out.success = out.orthogonal && out.correlated;
  out.output = x;
  return out;
}

GameInput sample_game_input(const GameParams& gp, std::uint64_t seed) {
  Rng rng(seed);
  GameInput in;
  in.a.resize(gp.d / 2, gp.d);
  for (Eigen::Index r = 0; r < in.a.rows(); ++r) {
    for (Eigen::Index c = 0; c < in.a.cols(); ++c) in.a(r, c) = rng.sign();
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(gp.d));
  in.v.resize(gp.d);
  for (Eigen::Index c = 0; c < gp.d; ++c) in.v[c] = rng.sign() * scale;
  return in;
}

namespace {

class Normalized final : public Protocol {
 public:
  Normalized(ProtocolPtr inner, const GameParams& gp) : inner_(std::move(inner)), gp_(gp) {}

  BitString alice_round1(const RowMatrix& a) const override { return inner_->alice_round1(a); }
  RowList alice_round3(const RowMatrix& a, const Vector& v) const override { return inner_->alice_round3(a, v); }
  Vector bob_output(const BitString& m, const Vector& v, const RowList& rows) const override {
    const Vector x = inner_->bob_output(m, v, rows);
    const double norm = x.norm();
    if (norm < gp_.corr_threshold()) return Vector::Unit(gp_.d, 0);
    return x / norm;
  }

 private:
  ProtocolPtr inner_;
  GameParams gp_;
};

class Zero final : public Protocol {
 public:
  explicit Zero(const GameParams& gp) : gp_(gp) {}
  BitString alice_round1(const RowMatrix&) const override { return BitString(gp_.message_bits()); }
  RowList alice_round3(const RowMatrix&, const Vector&) const override {
    return RowList(static_cast<std::size_t>(gp_.n_rows));
  }
  Vector bob_output(const BitString&, const Vector&, const RowList&) const override {
    return Vector::Zero(gp_.d);
  }

 private:
  GameParams gp_;
};

class Echo final : public Protocol {
 public:
  explicit Echo(const GameParams& gp) : gp_(gp) {}
  BitString alice_round1(const RowMatrix&) const override { return BitString(gp_.message_bits()); }
  RowList alice_round3(const RowMatrix&, const Vector&) const override {
    return RowList(static_cast<std::size_t>(gp_.n_rows));
  }
  Vector bob_output(const BitString&, const Vector& v, const RowList&) const override { return v; }

 private:
  GameParams gp_;
};

class RowSketch final : public Protocol {
 public:
  RowSketch(const GameParams& gp, Vector shift) : gp_(gp), shift_(std::move(shift)) {}

  BitString alice_round1(const RowMatrix& a) const override {
    BitString m(gp_.message_bits());
    const auto rows = std::min<Eigen::Index>(gp_.k_msg, a.rows());
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < a.cols(); ++c) m.set(static_cast<std::size_t>(r * a.cols() + c), a(r, c) > 0.0);
    }
    return m;
  }

  RowList alice_round3(const RowMatrix& a, const Vector&) const override {
    RowList out(static_cast<std::size_t>(gp_.n_rows));
    for (std::size_t i = 0; i < out.size(); ++i) {
      const auto r = static_cast<Eigen::Index>(gp_.k_msg) + static_cast<Eigen::Index>(i);
      if (r < a.rows()) out[i] = a.row(r).transpose();
    }
    return out;
  }

  Vector bob_output(const BitString& m, const Vector& v, const RowList& rows) const override {
    const int d = gp_.d;
    std::vector<Vector> known;
    const auto from_msg = std::min<std::int64_t>(gp_.k_msg, d / 2);
    for (std::int64_t r = 0; r < from_msg; ++r) {
      Vector row(d);
      for (int c = 0; c < d; ++c) row[c] = m.get(static_cast<std::size_t>(r * d + c)) ? 1.0 : -1.0;
      known.push_back(std::move(row));
    }
    for (const auto& row : rows) {
      if (row) known.push_back(*row);
    }
    const Vector w = shift_.size() == 0 ? v : Vector(v + shift_);
    if (known.empty()) return w;
    Matrix cols(d, static_cast<Eigen::Index>(known.size()));
    for (std::size_t i = 0; i < known.size(); ++i) cols.col(static_cast<Eigen::Index>(i)) = known[i];
    const Matrix q = orthonormal_basis(cols);
    Vector x = w - q * (q.transpose() * w);
    x -= q * (q.transpose() * x);
    return project_to_ball(x);
  }

 private:
  GameParams gp_;
  Vector shift_;
};

class Cheating final : public Protocol {
 public:
  explicit Cheating(const GameParams& gp) : gp_(gp) {}
  BitString alice_round1(const RowMatrix&) const override { return BitString(gp_.message_bits()); }
  RowList alice_round3(const RowMatrix&, const Vector&) const override {
    RowList out(static_cast<std::size_t>(gp_.n_rows));
    out.front() = Vector::Constant(gp_.d, 2.0);
    return out;
  }
  Vector bob_output(const BitString&, const Vector&, const RowList&) const override {
    return Vector::Zero(gp_.d);
  }

 private:
  GameParams gp_;
};

}  // namespace

ProtocolPtr normalize_output(ProtocolPtr proto, const GameParams& gp) {
  return std::make_shared<Normalized>(std::move(proto), gp);
}

SuccessEstimate estimate_success(const Protocol& proto, const GameParams& gp, std::uint64_t trials,
                                 std::uint64_t seed, unsigned jobs) {
  if (trials < 1) throw PreconditionViolated("estimate_success needs at least one trial");
  SuccessEstimate est;
  est.trials = trials;
  for (std::uint64_t t = 0; t < trials; ++t) est.trial_seeds.push_back(derive_seed(seed, stream::kGame, t));
  est.outcomes = parallel_map(static_cast<std::size_t>(trials), jobs, [&](std::size_t t) {
    const GameInput in = sample_game_input(gp, est.trial_seeds[t]);
    return play(proto, in.a, in.v, gp);
  });
  for (const auto& o : est.outcomes) est.successes += o.success ? 1 : 0;
  est.rate = static_cast<double>(est.successes) / static_cast<double>(trials);
  est.ci95 = clopper_pearson(est.successes, trials);
  return est;
}

namespace protocols {
ProtocolPtr zero(const GameParams& gp) { return std::make_shared<Zero>(gp); }
ProtocolPtr echo(const GameParams& gp) { return std::make_shared<Echo>(gp); }
ProtocolPtr row_sketch(const GameParams& gp) { return std::make_shared<RowSketch>(gp, Vector()); }
ProtocolPtr row_sketch(const GameParams& gp, const Vector& shift) {
  if (shift.size() != gp.d) throw PreconditionViolated("row_sketch shift must have length d");
  return std::make_shared<RowSketch>(gp, shift);
}
ProtocolPtr cheating(const GameParams& gp) {
  if (gp.n_rows < 1) throw PreconditionViolated("cheating protocol needs n ≥ 1");
  return std::make_shared<Cheating>(gp);
}
}  // namespace protocols

}  // namespace memlb
