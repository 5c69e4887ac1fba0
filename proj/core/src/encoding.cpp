#include "memlb/encoding.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <set>
#include <sstream>

#include "memlb/errors.hpp"
#include "memlb/rng.hpp"

namespace memlb {

LevelSchedule level_schedule(int d, double s, std::int64_t k, std::int64_t n, double log_base,
                             std::optional<int> levels) {
  if (d < 2) throw DegenerateSchedule("d must be ≥ 2");
  if (!(s >= 1.0) || k < 1) throw DegenerateSchedule("s and k must be ≥ 1");
  if (n < 1 || n > d) throw DegenerateSchedule("Δ = d/n must be ≥ 1");
  if (!(log_base > 1.0)) throw DegenerateSchedule("log base must exceed 1");
  LevelSchedule out;
  out.d = d;
  out.s = s;
  out.k = k;
  out.n = n;
  out.log_base = log_base;
  const double dd = static_cast<double>(d);
  const double lg = std::log(dd) / std::log(log_base);
  out.delta_cap = dd / static_cast<double>(n);
  const double s0 = s / (lg * lg);
  const double ratio = out.delta_cap / std::pow(lg, 5);
  const double target = dd / 10.0;
  if (s0 < 1.0) throw DegenerateSchedule("s₀ = s/log²d < 1");

  if (levels) {
    if (*levels < 1) throw DegenerateSchedule("H must be ≥ 1");
    out.levels = *levels;
    out.levels_overridden = true;
  } else {
    if (s0 >= target) throw DegenerateSchedule("H would be 0: s₀ already reaches d/10");
    if (ratio <= 1.0) throw DegenerateSchedule("H is undefined: Δ/log⁵d ≤ 1 never reaches d/10");
    int h = 1;
    double sh = s0 * ratio;
    while (sh < target) {
      sh *= ratio;
      if (++h > 10000) throw DegenerateSchedule("H exceeds 10000");
    }
    out.levels = h;
  }

  const int big_h = out.levels;
  double running = 0.0;
  for (int h = 0; h <= big_h; ++h) {
    const double sh = h < big_h ? s0 * std::pow(ratio, h) : target;
    out.s_h.push_back(sh);
    out.s_h_rounded.push_back(std::llround(sh));
    if (h >= 1) running += sh;
    out.s_leq.push_back(running);
    out.alpha_exp.push_back(-std::pow(8.0, h + 1));
    out.gamma_exp.push_back(sh * dd - 2.0 * static_cast<double>(k) * dd);
    out.cover_exp.push_back(sh / lg);
  }
  out.l_seq = s / (4.0 * std::pow(lg, 8));
  return out;
}

Table build_table(const Protocol& proto, const BitString& m, const RowMatrix& b, const std::vector<Vector>& vs,
                  std::size_t n_rows, std::uint64_t cap) {
  const auto base = static_cast<std::uint64_t>(b.rows()) + 1;
  double total = static_cast<double>(vs.size());
  for (std::size_t i = 0; i < n_rows; ++i) total *= static_cast<double>(base);
  if (total > static_cast<double>(cap)) throw EnumerationCapExceeded("build_table", total, static_cast<double>(cap));

  Table t;
  t.message = m;
  t.base_rows = static_cast<std::size_t>(b.rows());
  t.n_rows = n_rows;
  const auto per_v = static_cast<std::uint64_t>(std::llround(total)) / std::max<std::uint64_t>(vs.size(), 1);
  t.entries.reserve(static_cast<std::size_t>(total));
  for (std::size_t vi = 0; vi < vs.size(); ++vi) {
    for (std::uint64_t code = 0; code < per_v; ++code) {
      std::vector<std::size_t> tuple(n_rows);
      std::uint64_t rest = code;
      for (std::size_t slot = n_rows; slot-- > 0;) {
        tuple[slot] = static_cast<std::size_t>(rest % base);
        rest /= base;
      }
      RowList rows(n_rows);
      for (std::size_t slot = 0; slot < n_rows; ++slot) {
        if (tuple[slot] != 0) rows[slot] = b.row(static_cast<Eigen::Index>(tuple[slot] - 1)).transpose();
      }
      t.entries.push_back({vi, tuple, proto.bob_output(m, vs[vi], rows)});
    }
  }
  return t;
}

std::size_t distinct_outputs(const Table& table) {
  std::set<std::vector<double>> seen;
  for (const auto& e : table.entries) seen.insert(std::vector<double>(e.x.data(), e.x.data() + e.x.size()));
  return seen.size();
}

std::vector<std::size_t> orthogonal_entries(const Table& table, const RowMatrix& b, double xi_prime) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < table.entries.size(); ++i) {
    if (row_infinity_norm(b, table.entries[i].x) <= xi_prime) out.push_back(i);
  }
  return out;
}

Vector sign_row(std::uint64_t code, int d) {
  Vector r(d);
  for (int i = 0; i < d; ++i) r[i] = (code >> i) & 1u ? 1.0 : -1.0;
  return r;
}

namespace {

bool row_passes(const Vector& row, const std::vector<Vector>& xs, double xi_prime) {
  return std::all_of(xs.begin(), xs.end(), [&](const Vector& x) { return std::abs(dot_ordered(row, x)) <= xi_prime; });
}

RowMatrix member_from_rows(const std::vector<std::uint64_t>& codes, int d) {
  RowMatrix m(static_cast<Eigen::Index>(codes.size()), d);
  for (std::size_t r = 0; r < codes.size(); ++r) m.row(static_cast<Eigen::Index>(r)) = sign_row(codes[r], d).transpose();
  return m;
}

}  // namespace

BlockCount orth_block_count(const std::vector<Vector>& xs, int s_rows, int d, double xi_prime, std::uint64_t cap,
                            CountMode mode, std::uint64_t samples, std::uint64_t seed) {
  if (s_rows < 0 || d < 1 || d > 62) throw PreconditionViolated("orth_block_count needs 0 ≤ s_rows and 1 ≤ d ≤ 62");
  for (const auto& x : xs) {
    if (x.size() != d) throw PreconditionViolated("constraint vector has wrong dimension");
  }
  const double space_log2 = static_cast<double>(s_rows) * d;
  const bool fits = space_log2 <= std::log2(static_cast<double>(cap));
  if (mode == CountMode::Exact && !fits) {
    throw CapExceeded("orth_block_count exhaustive rows", std::exp2(space_log2), static_cast<double>(cap));
  }
  BlockCount out;
  const std::size_t keep = 4;
  if (mode == CountMode::MonteCarlo || (mode == CountMode::Auto && !fits)) {
    if (samples < 1) throw PreconditionViolated("Monte Carlo mode needs samples ≥ 1");
    out.exact = false;
    Rng rng(seed);
    std::uint64_t hits = 0;
    std::vector<std::uint64_t> passing;
    for (std::uint64_t k = 0; k < samples; ++k) {
      const std::uint64_t code = rng.next_u64() & ((std::uint64_t{1} << d) - 1);
      if (row_passes(sign_row(code, d), xs, xi_prime)) {
        ++hits;
        if (passing.size() < keep) passing.push_back(code);
      }
    }
    const double frac = static_cast<double>(hits) / static_cast<double>(samples);
    out.row_fraction_ci = clopper_pearson(hits, samples);
    out.row_count = frac * std::exp2(d);
    out.log2_count = hits == 0 ? -std::numeric_limits<double>::infinity()
                               : static_cast<double>(s_rows) * std::log2(out.row_count);
    if (s_rows > 0) {
      for (std::uint64_t code : passing) out.sample_members.push_back(member_from_rows(std::vector<std::uint64_t>(static_cast<std::size_t>(s_rows), code), d));
    }
    return out;
  }

  std::vector<std::uint64_t> passing;
  const std::uint64_t rows = std::uint64_t{1} << d;
  for (std::uint64_t code = 0; code < rows; ++code) {
    if (row_passes(sign_row(code, d), xs, xi_prime)) passing.push_back(code);
  }
  out.row_count = static_cast<double>(passing.size());
  out.log2_count = passing.empty() ? (s_rows == 0 ? 0.0 : -std::numeric_limits<double>::infinity())
                                   : static_cast<double>(s_rows) * std::log2(out.row_count);
  if (out.log2_count < 63.0) {
    std::uint64_t c = 1;
    for (int r = 0; r < s_rows; ++r) c *= passing.size();
    out.count = c;
  }
  // First few members in lexicographic order of row codes (last row fastest).
  if (!passing.empty()) {
    std::vector<std::size_t> idx(static_cast<std::size_t>(s_rows), 0);
    for (std::size_t m = 0; m < keep; ++m) {
      std::vector<std::uint64_t> codes;
      for (std::size_t i : idx) codes.push_back(passing[i]);
      out.sample_members.push_back(member_from_rows(codes, d));
      std::size_t pos = idx.size();
      while (pos > 0 && ++idx[pos - 1] == passing.size()) idx[--pos] = 0;
      if (pos == 0) break;
    }
  }
  return out;
}

RowMatrix assemble(const Partition& p, const RowMatrix& a1, const RowMatrix& a2, const RowMatrix& a3) {
  if (a1.rows() != static_cast<Eigen::Index>(p.p1.size()) || a2.rows() != static_cast<Eigen::Index>(p.p2.size()) ||
      a3.rows() != static_cast<Eigen::Index>(p.p3.size())) {
    throw PreconditionViolated("block heights do not match the partition");
  }
  const Eigen::Index cols = std::max({a1.cols(), a2.cols(), a3.cols()});
  RowMatrix out(static_cast<Eigen::Index>(p.p1.size() + p.p2.size() + p.p3.size()), cols);
  for (std::size_t j = 0; j < p.p1.size(); ++j) out.row(static_cast<Eigen::Index>(p.p1[j])) = a1.row(static_cast<Eigen::Index>(j));
  for (std::size_t j = 0; j < p.p2.size(); ++j) out.row(static_cast<Eigen::Index>(p.p2[j])) = a2.row(static_cast<Eigen::Index>(j));
  for (std::size_t j = 0; j < p.p3.size(); ++j) out.row(static_cast<Eigen::Index>(p.p3[j])) = a3.row(static_cast<Eigen::Index>(j));
  return out;
}

Decomposed decompose(const RowMatrix& a, const Partition& p) {
  auto take = [&](const std::vector<std::size_t>& part) {
    RowMatrix m(static_cast<Eigen::Index>(part.size()), a.cols());
    for (std::size_t j = 0; j < part.size(); ++j) m.row(static_cast<Eigen::Index>(j)) = a.row(static_cast<Eigen::Index>(part[j]));
    return m;
  };
  return {take(p.p1), take(p.p2), take(p.p3)};
}

std::vector<Partition> partitions(std::size_t rows, std::size_t s2, std::size_t s3) {
  if (s2 + s3 > rows) throw PreconditionViolated("partition parts exceed the row count");
  std::vector<Partition> out;
  std::vector<std::size_t> all(rows);
  for (std::size_t i = 0; i < rows; ++i) all[i] = i;
  // Choose P2 then P3 from the remainder, both as increasing index sets.
  std::function<void(std::size_t, std::vector<std::size_t>&, const std::vector<std::size_t>&, std::size_t,
                     const std::function<void(const std::vector<std::size_t>&)>&)>
      choose = [&](std::size_t start, std::vector<std::size_t>& cur, const std::vector<std::size_t>& pool,
                   std::size_t want, const std::function<void(const std::vector<std::size_t>&)>& emit) {
        if (cur.size() == want) {
          emit(cur);
          return;
        }
        for (std::size_t i = start; i < pool.size(); ++i) {
          cur.push_back(pool[i]);
          choose(i + 1, cur, pool, want, emit);
          cur.pop_back();
        }
      };
  std::vector<std::size_t> cur2;
  choose(0, cur2, all, s2, [&](const std::vector<std::size_t>& p2) {
    std::vector<std::size_t> rest;
    for (std::size_t i : all) {
      if (!std::binary_search(p2.begin(), p2.end(), i)) rest.push_back(i);
    }
    std::vector<std::size_t> cur3;
    choose(0, cur3, rest, s3, [&](const std::vector<std::size_t>& p3) {
      Partition p;
      p.p2 = p2;
      p.p3 = p3;
      for (std::size_t i : rest) {
        if (!std::binary_search(p3.begin(), p3.end(), i)) p.p1.push_back(i);
      }
      out.push_back(std::move(p));
    });
  });
  return out;
}

RowMatrix matrix_from_code(std::uint64_t code, int rows, int d) {
  RowMatrix m(rows, d);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < d; ++c) m(r, c) = (code >> (r * d + c)) & 1u ? 1.0 : -1.0;
  }
  return m;
}

std::uint64_t matrix_code(const RowMatrix& a) {
  std::uint64_t code = 0;
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    for (Eigen::Index c = 0; c < a.cols(); ++c) {
      if (a(r, c) > 0.0) code |= std::uint64_t{1} << (r * a.cols() + c);
    }
  }
  return code;
}

namespace {

constexpr double kUnitTol = 1e-9;

double default_xi_prime(int d) {
  const double dd = static_cast<double>(d);
  return std::sqrt(dd) * 2.0 / (dd * dd * dd);
}

// Residual test of an ordered tuple: the first vector is unit, every later one
// keeps a component of norm ≥ threshold outside the span of its predecessors.
bool is_rli(const std::vector<const Vector*>& seq, double threshold) {
  if (seq.empty()) return false;
  const Eigen::Index d = seq.front()->size();
  Matrix basis(d, static_cast<Eigen::Index>(seq.size()));
  Eigen::Index rank = 0;
  for (std::size_t j = 0; j < seq.size(); ++j) {
    Vector r = *seq[j];
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index k = 0; k < rank; ++k) r -= basis.col(k).dot(r) * basis.col(k);
    }
    const double norm = r.norm();
    if (j > 0 && norm < threshold) return false;
    if (norm == 0.0) return false;
    basis.col(rank++) = r / norm;
  }
  return true;
}

}  // namespace

MicroResult encode_micro(const Protocol& proto, const MicroConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const int d = cfg.d;
  if (d < 2 || d > 8 || d % 2 != 0) throw PreconditionViolated("encode_micro needs even d ≤ 8");
  const int half = d / 2;
  if (cfg.s_rows < 1 || cfg.s_rows > half) throw PreconditionViolated("s_rows must lie in [1, d/2]");
  if (cfg.l_seq < 1) throw PreconditionViolated("l_seq must be ≥ 1");
  if (cfg.v_count < 1 || cfg.message_samples < 1) throw PreconditionViolated("need at least one v and one sample");
  if (cfg.k < 1 || cfg.n < 1) throw PreconditionViolated("k and n must be ≥ 1");

  MicroResult res;
  res.config = cfg;
  res.xi_prime = cfg.xi_prime ? *cfg.xi_prime : default_xi_prime(d);
  res.rli_threshold = std::pow(static_cast<double>(d), -8.0) / 4.0;
  res.gamma_exp = static_cast<double>(cfg.s_rows) * d - 2.0 * static_cast<double>(cfg.k) * d;

  Rng vrng(derive_seed(cfg.seed, stream::kPublic, 0));
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  for (std::size_t i = 0; i < cfg.v_count; ++i) {
    Vector v(d);
    for (int c = 0; c < d; ++c) v[c] = vrng.sign() * scale;
    res.vs.push_back(std::move(v));
  }

  const auto kd = static_cast<std::size_t>(cfg.k) * static_cast<std::size_t>(d);
  for (std::size_t i = 0; i < cfg.message_samples; ++i) {
    Rng arng(derive_seed(cfg.seed, stream::kInstance, i));
    RowMatrix a(half, d);
    for (int r = 0; r < half; ++r) {
      for (int c = 0; c < d; ++c) a(r, c) = arng.sign();
    }
    BitString m = proto.alice_round1(a);
    if (m.size() != kd) throw MessageLengthViolation("protocol message is not k·d bits");
    if (std::find(res.messages.begin(), res.messages.end(), m) == res.messages.end()) res.messages.push_back(std::move(m));
  }

  const auto s2 = static_cast<std::size_t>(cfg.s_rows);
  const std::size_t s1 = static_cast<std::size_t>(half) - s2;
  res.parts = partitions(static_cast<std::size_t>(half), s2, 0);
  const std::uint64_t a1_count = std::uint64_t{1} << (s1 * static_cast<std::size_t>(d));
  const double pairs = static_cast<double>(res.messages.size()) * static_cast<double>(a1_count);
  if (pairs > static_cast<double>(cfg.cap)) throw CapExceeded("encode_micro (message, A1) loop", pairs, static_cast<double>(cfg.cap));
  const std::size_t a2_bits = s2 * static_cast<std::size_t>(d);
  if (a2_bits > 24) throw CapExceeded("encode_micro A2 space", std::exp2(static_cast<double>(a2_bits)), std::exp2(24.0));
  const std::uint64_t a2_space = std::uint64_t{1} << a2_bits;
  const std::uint64_t row_space = std::uint64_t{1} << d;

  res.counters.messages = res.messages.size();
  res.counters.partitions = res.parts.size();
  std::set<std::uint64_t> a_union;
  std::vector<char> marks(a2_space);

  for (std::size_t mi = 0; mi < res.messages.size(); ++mi) {
    for (std::uint64_t a1_code = 0; a1_code < a1_count; ++a1_code) {
      ++res.counters.a1_matrices;
      const RowMatrix a1 = matrix_from_code(a1_code, static_cast<int>(s1), d);
      const Table table = build_table(proto, res.messages[mi], a1, res.vs, static_cast<std::size_t>(cfg.n), cfg.cap);
      ++res.counters.tables;
      res.counters.table_entries += table.entries.size();
      const std::vector<std::size_t> orth = orthogonal_entries(table, a1, res.xi_prime);
      res.counters.orthogonal_entries += orth.size();
      std::vector<std::size_t> unit;
      for (std::size_t e : orth) {
        if (std::abs(table.entries[e].x.norm() - 1.0) <= kUnitTol) unit.push_back(e);
      }
      res.counters.unit_orthogonal_entries += unit.size();

      // Passing sign rows per entry.
      std::vector<std::vector<char>> pass(unit.size(), std::vector<char>(row_space));
      for (std::size_t u = 0; u < unit.size(); ++u) {
        const Vector& x = table.entries[unit[u]].x;
        for (std::uint64_t code = 0; code < row_space; ++code) {
          pass[u][code] = std::abs(dot_ordered(sign_row(code, d), x)) <= res.xi_prime;
        }
      }

      // Ordered tuples of distinct entries in lexicographic order; a set is
      // used once, by its first RLI ordering.
      std::fill(marks.begin(), marks.end(), 0);
      std::uint64_t s_size = 0;
      std::set<std::vector<std::size_t>> used;
      std::vector<std::size_t> tuple;
      std::vector<char> taken(unit.size(), 0);
      std::function<void()> scan = [&]() {
        if (tuple.size() == cfg.l_seq) {
          if (++res.counters.tuples_checked > cfg.cap) {
            throw CapExceeded("encode_micro RLI tuple scan", static_cast<double>(res.counters.tuples_checked),
                              static_cast<double>(cfg.cap));
          }
          std::vector<std::size_t> key = tuple;
          std::sort(key.begin(), key.end());
          if (used.count(key)) return;
          std::vector<const Vector*> seq;
          for (std::size_t u : tuple) seq.push_back(&table.entries[unit[u]].x);
          if (!is_rli(seq, res.rli_threshold)) return;
          used.insert(key);
          ++res.counters.rli_sequences;
          std::vector<std::uint64_t> rows;
          for (std::uint64_t code = 0; code < row_space; ++code) {
            bool ok = true;
            for (std::size_t u : tuple) ok = ok && pass[u][code];
            if (ok) rows.push_back(code);
          }
          if (rows.empty()) return;
          std::vector<std::size_t> idx(s2, 0);
          while (true) {
            std::uint64_t a2 = 0;
            for (std::size_t r = 0; r < s2; ++r) a2 |= rows[idx[r]] << (r * static_cast<std::size_t>(d));
            if (!marks[a2]) {
              marks[a2] = 1;
              ++s_size;
            }
            std::size_t pos = s2;
            while (pos > 0 && ++idx[pos - 1] == rows.size()) idx[--pos] = 0;
            if (pos == 0) break;
          }
          return;
        }
        for (std::size_t u = 0; u < unit.size(); ++u) {
          if (taken[u]) continue;
          taken[u] = 1;
          tuple.push_back(u);
          scan();
          tuple.pop_back();
          taken[u] = 0;
        }
      };
      scan();
      if (s_size > 0) ++res.counters.nonempty_s;

      const bool under = res.gamma_exp >= 63.0 ||
                         (res.gamma_exp >= 0.0 ? s_size <= (std::uint64_t{1} << static_cast<int>(std::floor(res.gamma_exp)))
                                               : s_size == 0);
      for (std::size_t pi = 0; pi < res.parts.size(); ++pi) {
        if (!under) {
          ++res.counters.over_threshold;
          continue;
        }
        ++res.counters.under_threshold;
        if (s_size == 0) continue;
        EmittedSet set;
        set.message = mi;
        set.partition = pi;
        set.a1_code = a1_code;
        set.s_size = s_size;
        set.j_size = s_size;  // times 2^{d·s_{≤0}} = 1
        set.gamma_exp = res.gamma_exp;
        const RowMatrix a3(0, d);
        for (std::uint64_t a2 = 0; a2 < a2_space; ++a2) {
          if (!marks[a2]) continue;
          set.s_members.push_back(a2);
          const RowMatrix full = assemble(res.parts[pi], a1, matrix_from_code(a2, static_cast<int>(s2), d), a3);
          set.members.push_back(matrix_code(full));
          a_union.insert(set.members.back());
        }
        res.emitted.push_back(std::move(set));
        ++res.counters.emitted_sets;
      }
    }
  }
  res.a_set.assign(a_union.begin(), a_union.end());
  res.counters.a_size = res.a_set.size();
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

MicroCheck recheck_micro(const Protocol& proto, const MicroResult& res) {
  MicroCheck check;
  const int d = res.config.d;
  const int half = d / 2;
  const auto n = static_cast<std::size_t>(res.config.n);
  for (const EmittedSet& set : res.emitted) {
    const Partition& p = res.parts.at(set.partition);
    const BitString& m = res.messages.at(set.message);
    const auto s1 = static_cast<int>(p.p1.size());
    const RowMatrix a1 = matrix_from_code(set.a1_code, s1, d);

    // Bob's outputs by direct calls over every v and every n-tuple.
    std::vector<Vector> candidates;
    std::vector<std::size_t> tuple(n, 0);
    for (const Vector& v : res.vs) {
      std::fill(tuple.begin(), tuple.end(), 0);
      while (true) {
        RowList rows(n);
        for (std::size_t i = 0; i < n; ++i) {
          if (tuple[i] > 0) rows[i] = a1.row(static_cast<Eigen::Index>(tuple[i] - 1)).transpose();
        }
        const Vector x = proto.bob_output(m, v, rows);
        const double orth = s1 == 0 ? 0.0 : (Matrix(a1) * x).cwiseAbs().maxCoeff();
        if (orth <= res.xi_prime && std::abs(x.norm() - 1.0) <= kUnitTol) candidates.push_back(x);
        std::size_t pos = n;
        while (pos > 0 && ++tuple[pos - 1] == static_cast<std::size_t>(s1) + 1) tuple[--pos] = 0;
        if (pos == 0) break;
      }
    }

    // RLI test through explicit projectors P = Y (YᵀY)⁺ Yᵀ.
    auto rli_by_projector = [&](const std::vector<std::size_t>& order) {
      for (std::size_t j = 1; j < order.size(); ++j) {
        Matrix y(d, static_cast<Eigen::Index>(j));
        for (std::size_t i = 0; i < j; ++i) y.col(static_cast<Eigen::Index>(i)) = candidates[order[i]];
        const Matrix proj = y * (y.transpose() * y).completeOrthogonalDecomposition().pseudoInverse() * y.transpose();
        const Vector& yj = candidates[order[j]];
        if ((yj - proj * yj).norm() < res.rli_threshold) return false;
      }
      return true;
    };

    const std::size_t len = res.config.l_seq;
    std::uint64_t recount = 0;
    for (std::size_t mi = 0; mi < set.members.size(); ++mi) {
      ++check.matrices_checked;
      const RowMatrix full = matrix_from_code(set.members[mi], half, d);
      const Decomposed parts = decompose(full, p);
      if (matrix_code(parts.a1) != set.a1_code || parts.a3.rows() != 0 ||
          matrix_code(assemble(p, parts.a1, parts.a2, parts.a3)) != set.members[mi]) {
        ++check.decomposition_failures;
        continue;
      }
      // A2 belongs to 𝒮 iff some RLI sequence of candidates has every A2 row ξ′-orthogonal to it.
      bool member = false;
      std::vector<std::size_t> order;
      std::function<void()> search = [&]() {
        if (member) return;
        if (order.size() == len) {
          if (!rli_by_projector(order)) return;
          for (std::size_t i : order) {
            if ((Matrix(parts.a2) * candidates[i]).cwiseAbs().maxCoeff() > res.xi_prime) return;
          }
          member = true;
          return;
        }
        for (std::size_t c = 0; c < candidates.size(); ++c) {
          if (std::find(order.begin(), order.end(), c) != order.end()) continue;
          order.push_back(c);
          search();
          order.pop_back();
        }
      };
      search();
      if (!member) ++check.membership_failures;
      ++recount;
    }
    const double j_log2 = set.j_size == 0 ? -1.0 : std::log2(static_cast<double>(set.j_size));
    if (recount != set.j_size || set.members.size() != set.s_size || j_log2 > set.gamma_exp + d * 0.0) {
      ++check.counting_failures;
    }
  }
  return check;
}

std::string micro_report_text(const MicroResult& r, const MicroCheck& check) {
  std::ostringstream out;
  const MicroConfig& c = r.config;
  out << "encode_micro d=" << c.d << " k=" << c.k << " n=" << c.n << " H=1 s_1=" << c.s_rows << " L_seq=" << c.l_seq
      << " |V|=" << c.v_count << " seed=" << c.seed << "\n";
  out << "xi_prime=" << r.xi_prime << " rli_threshold=" << r.rli_threshold << " log2_Gamma_1=" << r.gamma_exp << "\n";
  const MicroCounters& k = r.counters;
  out << "messages=" << k.messages << " partitions=" << k.partitions << " a1_matrices=" << k.a1_matrices
      << " tables=" << k.tables << " table_entries=" << k.table_entries << "\n";
  out << "orthogonal_entries=" << k.orthogonal_entries << " unit_orthogonal_entries=" << k.unit_orthogonal_entries
      << " tuples_checked=" << k.tuples_checked << " rli_sequences=" << k.rli_sequences << "\n";
  out << "nonempty_S=" << k.nonempty_s << " under_threshold=" << k.under_threshold
      << " over_threshold=" << k.over_threshold << " emitted_sets=" << k.emitted_sets << " |A_1|=" << k.a_size << "\n";
  out << "recheck matrices=" << check.matrices_checked << " decomposition_failures=" << check.decomposition_failures
      << " membership_failures=" << check.membership_failures << " counting_failures=" << check.counting_failures
      << " verdict=" << (check.ok() ? "PASS" : "FAIL") << "\n";
  return out.str();
}

std::string micro_report_csv(const MicroResult& r) {
  std::ostringstream out;
  out << "level,sets_emitted,log2_S_max,log2_Gamma,under_threshold,over_threshold,log2_J_max,log2_A\n";
  double s_max = 0.0;
  for (const auto& e : r.emitted) s_max = std::max(s_max, static_cast<double>(e.s_size));
  const double ls = s_max > 0.0 ? std::log2(s_max) : -1.0;
  const double la = r.a_set.empty() ? -1.0 : std::log2(static_cast<double>(r.a_set.size()));
  out << 1 << ',' << r.counters.emitted_sets << ',' << ls << ',' << r.gamma_exp << ',' << r.counters.under_threshold
      << ',' << r.counters.over_threshold << ',' << ls << ',' << la << "\n";
  return out.str();
}

}  // namespace memlb
