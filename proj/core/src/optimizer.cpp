#include "memlb/optimizer.hpp"

#include <cmath>

#include "memlb/errors.hpp"

namespace memlb {

namespace {

void write_vector(MemoryState& m, const Vector& v) {
  m.push_doubles(v.data(), static_cast<std::size_t>(v.size()));
}

Vector read_vector(BitReader& r, int n) {
  Vector v(n);
  r.next_doubles(v.data(), static_cast<std::size_t>(n));
  return v;
}

void check_state(const Algorithm& alg, const MemoryState& m, std::size_t round) {
  if (m.size() != alg.declared_size()) throw StateSizeViolation(round, alg.declared_size(), m.size());
}

class SubgradientDescent final : public Algorithm {
 public:
  SubgradientDescent(int d, StepRule rule) : d_(d), rule_(rule) {
    if (d < 1) throw PreconditionViolated("subgradient descent needs d ≥ 1");
    if (rule.kind == StepRule::Kind::Fixed && !(rule.eta >= 0.0)) {
      throw PreconditionViolated("fixed step must be ≥ 0");
    }
    if (rule.kind == StepRule::Kind::Decreasing && !(rule.eta > 0.0)) {
      throw PreconditionViolated("initial step must be > 0");
    }
  }

  std::string name() const override {
    return averaging() ? "subgradient-decreasing" : "subgradient-fixed";
  }
  int dim() const override { return d_; }
  std::size_t declared_size() const override {
    const auto d = static_cast<std::size_t>(d_);
    return averaging() ? 128 * d + 64 : 64 * d;
  }

  MemoryState init(std::uint64_t) const override {
    const Vector zero = Vector::Zero(d_);
    return pack(zero, zero, 0);
  }

  Vector query(const MemoryState& m) const override {
    BitReader r(m);
    return read_vector(r, d_);
  }

  MemoryState update(const MemoryState& m, double, const Vector& g) const override {
    BitReader r(m);
    const Vector x = read_vector(r, d_);
    if (!averaging()) return pack(project_to_ball(x - rule_.eta * g), x, 0);
    const Vector avg = read_vector(r, d_);
    const std::uint64_t t = r.next_bits(64) + 1;
    const double step = rule_.eta / std::sqrt(static_cast<double>(t));
    const Vector next_avg = avg + (x - avg) / static_cast<double>(t);
    return pack(project_to_ball(x - step * g), next_avg, t);
  }

  Vector output(const MemoryState& m) const override {
    BitReader r(m);
    const Vector x = read_vector(r, d_);
    if (!averaging()) return x;
    const Vector avg = read_vector(r, d_);
    return r.next_bits(64) == 0 ? x : project_to_ball(avg);
  }

 private:
  bool averaging() const { return rule_.kind == StepRule::Kind::Decreasing; }

  MemoryState pack(const Vector& x, const Vector& avg, std::uint64_t t) const {
    MemoryState m;
    write_vector(m, x);
    if (averaging()) {
      write_vector(m, avg);
      m.push_bits(t, 64);
    }
    return m;
  }

  int d_;
  StepRule rule_;
};

class Ellipsoid final : public Algorithm {
 public:
  explicit Ellipsoid(int d) : d_(d) {
    if (d < 2) throw PreconditionViolated("ellipsoid method needs d ≥ 2");
  }

  std::string name() const override { return "ellipsoid"; }
  int dim() const override { return d_; }
  std::size_t declared_size() const override {
    const auto d = static_cast<std::size_t>(d_);
    return 64 * (d + d * d);
  }

  MemoryState init(std::uint64_t) const override {
    return pack(Vector::Zero(d_), Matrix::Identity(d_, d_));
  }

  Vector query(const MemoryState& m) const override {
    BitReader r(m);
    return project_to_ball(read_vector(r, d_));
  }

  MemoryState update(const MemoryState& m, double, const Vector& g) const override {
    Vector c;
    Matrix j;
    unpack(m, c, j);
    cut(c, j, g);
    // Feasibility cuts against ‖x‖ ≤ 1 until the center is back in the ball.
    for (int k = 0; k < 8 * d_ && c.norm() > 1.0; ++k) cut(c, j, c / c.norm());
    return pack(c, j);
  }

  Vector output(const MemoryState& m) const override { return query(m); }

 private:
  void cut(Vector& c, Matrix& j, const Vector& g) const {
    const Vector p = j.transpose() * g;
    const double norm = p.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw DegenerateEllipsoid("ellipsoid shape collapsed along the cut direction");
    }
    const Vector u = p / norm;
    const double n = static_cast<double>(d_);
    const Vector ju = j * u;
    c -= ju / (n + 1.0);
    const double shrink = 1.0 - std::sqrt((n - 1.0) / (n + 1.0));
    j -= shrink * ju * u.transpose();
    j *= n / std::sqrt(n * n - 1.0);
  }

  MemoryState pack(const Vector& c, const Matrix& j) const {
    MemoryState m;
    write_vector(m, c);
    m.push_doubles(j.data(), static_cast<std::size_t>(j.size()));  // column-major
    return m;
  }

  void unpack(const MemoryState& m, Vector& c, Matrix& j) const {
    BitReader r(m);
    c = read_vector(r, d_);
    j.resize(d_, d_);
    r.next_doubles(j.data(), static_cast<std::size_t>(j.size()));
  }

  int d_;
};

}  // namespace

Transcript run(const Algorithm& alg, const HardInstance& inst, std::size_t t_budget,
               std::uint64_t seed) {
  if (t_budget < 1) throw PreconditionViolated("t_budget must be ≥ 1");
  if (alg.dim() != inst.dim()) throw PreconditionViolated("algorithm and instance dimensions differ");
  Transcript t;
  t.instance = InstanceRef::of(inst);
  t.algorithm = alg.name();
  t.alg_seed = seed;
  t.t_budget = t_budget;
  t.rounds.reserve(t_budget);
  t.state_sizes.reserve(t_budget);

  MemoryState m = alg.init(seed);
  check_state(alg, m, 0);
  for (std::size_t round = 1; round <= t_budget; ++round) {
    const bool last = round == t_budget || alg.halted(m);
    Vector x = last ? alg.output(m) : alg.query(m);
    const double norm = x.norm();
    if (x.size() != inst.dim() || !(norm <= 1.0 + kBallTolerance)) throw QueryOutOfBall(round, norm);
    OracleAnswer answer = first_order(inst, x);
    if (last) {
      t.final_output = x;
      t.rounds.push_back({std::move(x), std::move(answer)});
      t.state_sizes.push_back(m.size());
      break;
    }
    m = alg.update(m, answer.value, answer.subgradient);
    check_state(alg, m, round);
    t.rounds.push_back({std::move(x), std::move(answer)});
    t.state_sizes.push_back(m.size());
  }
  return t;
}

AlgorithmPtr subgradient_descent(int d, StepRule rule) {
  return std::make_shared<SubgradientDescent>(d, rule);
}

AlgorithmPtr ellipsoid_method(int d) { return std::make_shared<Ellipsoid>(d); }

}  // namespace memlb
