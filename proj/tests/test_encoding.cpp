#include <doctest.h>

#include <set>

#include "memlb/encoding.hpp"
#include "memlb/errors.hpp"
#include "memlb/rng.hpp"
#include "support.hpp"

using namespace memlb;

namespace {

GameParams micro_game() { return GameParams{6, 1, 1, 1.0, 0.0}; }

std::vector<Vector> scaled_signs(std::size_t count, int d, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Vector> out;
  for (std::size_t i = 0; i < count; ++i) {
    Vector v(d);
    for (int c = 0; c < d; ++c) v[c] = rng.sign() / std::sqrt(static_cast<double>(d));
    out.push_back(v);
  }
  return out;
}

RowMatrix random_signs(int rows, int d, std::uint64_t seed) {
  Rng rng(seed);
  RowMatrix m(rows, d);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < d; ++c) m(r, c) = rng.sign();
  }
  return m;
}

MicroConfig emitting_config() {
  MicroConfig mc;
  mc.s_rows = 3;
  mc.v_count = 2;
  mc.seed = 1;
  return mc;
}

ProtocolPtr shifted(const GameParams& gp, std::uint64_t seed) {
  Rng rng(seed);
  Vector shift(gp.d);
  for (int i = 0; i < gp.d; ++i) shift[i] = rng.gaussian();
  return normalize_output(protocols::row_sketch(gp, shift), gp);
}

}  // namespace

TEST_CASE("level schedule exponents") {
  const LevelSchedule s = level_schedule(1024, 200.0, 1, 4, 2.0, 3);
  CHECK(s.delta_cap == 256.0);
  CHECK(s.levels == 3);
  CHECK(s.alpha_exp[0] == -8);
  CHECK(s.alpha_exp[1] == -64);
  CHECK(s.alpha_exp[2] == -512);
  CHECK(s.s_h.back() == doctest::Approx(102.4));
  for (std::size_t h = 0; h < s.s_h.size(); ++h) {
    CHECK(s.gamma_exp[h] == doctest::Approx(s.s_h[h] * 1024 - 2 * 1024));
    CHECK(s.cover_exp[h] == doctest::Approx(s.s_h[h] / 10.0));
  }
  CHECK(s.s_leq[0] == 0.0);
  CHECK(s.l_seq == doctest::Approx(200.0 / (4 * std::pow(10.0, 8))));
  const LevelSchedule t = level_schedule(1024, 200.0, 1, 32, 2.0, 1);
  CHECK(t.delta_cap == 32.0);
  CHECK_THROWS_AS(level_schedule(1024, 200.0, 1, 32), DegenerateSchedule);
  CHECK_THROWS_AS(level_schedule(16, 2.0, 1, 32), DegenerateSchedule);

  // base d makes log d = 1, so s₀ = s and the growth ratio is Δ
  const LevelSchedule g = level_schedule(1000, 2.0, 1, 40, 1000.0);
  CHECK(g.levels == 2);  // 2·25 < 100 ≤ 2·25²
  CHECK(g.s_h[1] == doctest::Approx(50.0));
  CHECK(g.s_h[2] == doctest::Approx(100.0));
  CHECK(g.s_leq[2] == doctest::Approx(150.0));
}

TEST_CASE("table sizes") {
  const GameParams gp = micro_game();
  const ProtocolPtr p = protocols::row_sketch(gp);
  const BitString m(6);
  const auto vs = scaled_signs(2, 6, 1);
  CHECK(build_table(*p, m, RowMatrix(0, 6), vs, 1).entries.size() == 2);
  CHECK(build_table(*p, m, random_signs(1, 6, 2), vs, 1).entries.size() == 4);
  for (int rows = 0; rows <= 3; ++rows) {
    for (std::size_t n = 1; n <= 2; ++n) {
      const Table t = build_table(*p, m, random_signs(rows, 6, 3), vs, n);
      CHECK(t.entries.size() == 2 * static_cast<std::size_t>(std::pow(rows + 1, n)));
      CHECK(distinct_outputs(t) <= t.entries.size());
    }
  }
  CHECK_THROWS_AS(build_table(*p, m, random_signs(3, 6, 3), vs, 2, 10), EnumerationCapExceeded);
}

TEST_CASE("orthogonal entries equal a naive filter") {
  const GameParams gp = micro_game();
  const ProtocolPtr p = protocols::row_sketch(gp);
  const RowMatrix b = random_signs(2, 6, 4);
  const Table t = build_table(*p, BitString(6), b, scaled_signs(3, 6, 5), 1);
  for (double xi : {0.0, 1e-9, 0.05, 0.5}) {
    std::vector<std::size_t> naive;
    for (std::size_t i = 0; i < t.entries.size(); ++i) {
      if ((b * t.entries[i].x).cwiseAbs().maxCoeff() <= xi) naive.push_back(i);
    }
    CHECK(orthogonal_entries(t, b, xi) == naive);
  }
  CHECK(orthogonal_entries(t, b, 6.0).size() == t.entries.size());
}

TEST_CASE("orth block count") {
  const BlockCount e1 = orth_block_count({Vector::Unit(4, 0)}, 1, 4, 0.5, 1 << 20, CountMode::Exact);
  CHECK(e1.count == 0);
  const BlockCount none = orth_block_count({}, 2, 4, 0.5, 1 << 20, CountMode::Exact);
  CHECK(none.count == 256);
  std::mt19937_64 gen(6);
  for (int t = 0; t < 5; ++t) {
    const Vector x = memlb::testing::random_unit(10, gen);
    const double xi = 0.3;
    std::uint64_t brute = 0;
    for (std::uint32_t code = 0; code < 1024; ++code) {
      double ip = 0.0;
      for (int i = 0; i < 10; ++i) ip += ((code >> i) & 1u ? 1.0 : -1.0) * x[i];
      if (std::abs(ip) <= xi) ++brute;
    }
    const BlockCount c = orth_block_count({x}, 1, 10, xi, 1 << 20, CountMode::Exact);
    CHECK(c.exact);
    CHECK(c.count == brute);
  }
  CHECK_THROWS_AS(orth_block_count({}, 3, 10, 0.3, 1 << 20, CountMode::Exact), CapExceeded);
  const BlockCount mc = orth_block_count({}, 3, 10, 0.3, 1 << 20, CountMode::Auto, 1000, 1);
  CHECK_FALSE(mc.exact);
  CHECK(mc.row_fraction_ci.contains(1.0));
}

TEST_CASE("partition placement is a bijection") {
  const std::vector<Partition> parts = partitions(4, 2, 1);
  CHECK(parts.size() == 6 * 2);
  std::set<std::uint64_t> seen;
  for (const Partition& p : parts) {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      const RowMatrix a1 = random_signs(static_cast<int>(p.p1.size()), 6, seed);
      const RowMatrix a2 = random_signs(2, 6, seed + 10);
      const RowMatrix a3 = random_signs(1, 6, seed + 20);
      const RowMatrix full = assemble(p, a1, a2, a3);
      const Decomposed back = decompose(full, p);
      CHECK(back.a1 == a1);
      CHECK(back.a2 == a2);
      CHECK(back.a3 == a3);
      CHECK(matrix_from_code(matrix_code(full), 4, 6) == full);
      seen.insert(matrix_code(full));
    }
  }
}

TEST_CASE("encode_micro with a constant-zero protocol emits nothing") {
  const GameParams gp = micro_game();
  MicroConfig mc;
  mc.s_rows = 2;
  const MicroResult r = encode_micro(*protocols::zero(gp), mc);
  CHECK(r.counters.unit_orthogonal_entries == 0);
  CHECK(r.counters.rli_sequences == 0);
  CHECK(r.emitted.empty());
  CHECK(r.a_set.empty());
}

TEST_CASE("encode_micro: emitted sets survive the independent recheck") {
  const GameParams gp = micro_game();
  const ProtocolPtr p = shifted(gp, 3);
  const MicroResult r = encode_micro(*p, emitting_config());
  REQUIRE(r.counters.emitted_sets > 0);
  const MicroCheck c = recheck_micro(*p, r);
  CHECK(c.ok());
  CHECK(c.matrices_checked > 0);
  std::uint64_t members = 0;
  std::set<std::uint64_t> uni;
  for (const EmittedSet& e : r.emitted) {
    CHECK(static_cast<double>(e.j_size) <= std::exp2(e.gamma_exp));
    CHECK(e.members.size() == e.j_size);
    members += e.members.size();
    uni.insert(e.members.begin(), e.members.end());
  }
  CHECK(uni.size() == r.counters.a_size);
  CHECK(r.a_set.size() == uni.size());
  CHECK(members >= uni.size());
  CHECK(r.counters.under_threshold + r.counters.over_threshold == r.counters.a1_matrices * r.counters.partitions);

  const MicroResult again = encode_micro(*p, emitting_config());
  CHECK(micro_report_text(again, recheck_micro(*p, again)) == micro_report_text(r, c));
  CHECK(micro_report_csv(again) == micro_report_csv(r));
}

TEST_CASE("encode_micro caps name the loop") {
  const GameParams gp = micro_game();
  MicroConfig mc = emitting_config();
  mc.cap = 3;
  try {
    encode_micro(*shifted(gp, 3), mc);
    FAIL("expected CapExceeded");
  } catch (const CapExceeded& e) {
    CHECK(e.loop().find("encode_micro") != std::string::npos);
  }
}
