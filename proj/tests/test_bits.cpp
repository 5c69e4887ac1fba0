#include <doctest.h>

#include <bit>
#include <random>

#include "memlb/bits.hpp"
#include "memlb/errors.hpp"

using namespace memlb;

TEST_CASE("push and read bits across word boundaries") {
  std::mt19937_64 gen(3);
  BitString b;
  std::vector<std::pair<std::uint64_t, unsigned>> pushed;
  for (int i = 0; i < 200; ++i) {
    const unsigned w = 1 + static_cast<unsigned>(gen() % 64);
    std::uint64_t v = gen();
    if (w < 64) v &= (std::uint64_t{1} << w) - 1;
    pushed.emplace_back(v, w);
    b.push_bits(v, w);
  }
  BitReader r(b);
  for (auto [v, w] : pushed) CHECK(r.next_bits(w) == v);
  CHECK(r.position() == b.size());
  CHECK_THROWS_AS(r.next_bits(1), FormatError);
}

TEST_CASE("bulk doubles agree with single pushes, aligned or not") {
  const std::vector<double> xs = {1.5, -0.0, 3e-300, -7.25, 1e300};
  for (unsigned lead : {0u, 3u, 64u, 65u}) {
    BitString a;
    BitString b;
    a.push_bits(0x5, lead > 64 ? 64 : lead);
    b.push_bits(0x5, lead > 64 ? 64 : lead);
    if (lead > 64) {
      a.push_bits(1, lead - 64);
      b.push_bits(1, lead - 64);
    }
    a.push_doubles(xs.data(), xs.size());
    for (double x : xs) b.push_double(x);
    CHECK(a == b);
    std::vector<double> back(xs.size());
    a.read_doubles(lead, back.data(), back.size());
    for (std::size_t i = 0; i < xs.size(); ++i) CHECK(std::bit_cast<std::uint64_t>(back[i]) == std::bit_cast<std::uint64_t>(xs[i]));
  }
}

TEST_CASE("set, get, zero test and text form") {
  BitString b(70);
  CHECK(b.all_zero());
  b.set(0, true);
  b.set(69, true);
  CHECK(b.get(69));
  CHECK_FALSE(b.all_zero());
  const std::string s = b.to_string();
  CHECK(s.size() == 70);
  CHECK(s.front() == '1');
  CHECK(s.back() == '1');
  b.set(69, false);
  CHECK(b.to_string().back() == '0');
}
