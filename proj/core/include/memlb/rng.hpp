#pragma once

#include <cstdint>
#include <random>

namespace memlb {

/// splitmix64 finalizer; used for counter-mode seed derivation.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Sub-seed for trial `index` of stream `stream` under `master`. Depends only
/// on its arguments, so adding trials never perturbs earlier ones.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index) noexcept;

/// Stream tags used with derive_seed so unrelated consumers of one master seed
/// never collide.
namespace stream {
inline constexpr std::uint64_t kInstance = 0x696e7374;   // "inst"
inline constexpr std::uint64_t kAlgorithm = 0x616c676f;  // "algo"
inline constexpr std::uint64_t kProbe = 0x70726f62;      // "prob"
inline constexpr std::uint64_t kGame = 0x67616d65;       // "game"
inline constexpr std::uint64_t kPublic = 0x7075626c;     // "publ"
inline constexpr std::uint64_t kPoints = 0x706f696e;     // "poin"
}  // namespace stream

/// Portable random source. The engine sequence of mt19937_64 is fixed by the
/// standard; the std distributions are not, so all derived draws are coded here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform();

  /// Uniform integer in [0, n). Rejection sampling, unbiased.
  std::uint64_t below(std::uint64_t n);

  /// +1 or -1 with equal probability; consumes one bit of a cached word.
  int sign();

  /// Standard normal via Box-Muller.
  double gaussian();

 private:
  std::mt19937_64 engine_;
  std::uint64_t bit_word_ = 0;
  int bits_left_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace memlb
