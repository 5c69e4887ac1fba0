#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace memlb {

/// Fixed-length bit string. Bits are stored LSB-first in 64-bit words; bits past
/// size() in the last word are always zero so equality is word equality.
class BitString {
 public:
  BitString() = default;
  explicit BitString(std::size_t nbits) : words_((nbits + 63) / 64, 0), size_(nbits) {}

  std::size_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }

  bool get(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1u; }
  void set(std::size_t i, bool value);

  /// Appends `width` (≤ 64) low bits of `value`.
  void push_bits(std::uint64_t value, unsigned width);
  void push_double(double value);
  /// Bulk append; word-aligned fast path when size() % 64 == 0.
  void push_doubles(const double* values, std::size_t count);

  /// Reads `width` bits starting at `offset`.
  std::uint64_t read_bits(std::size_t offset, unsigned width) const;
  double read_double(std::size_t offset) const;
  void read_doubles(std::size_t offset, double* out, std::size_t count) const;

  bool all_zero() const noexcept;
  std::span<const std::uint64_t> words() const noexcept { return words_; }

  /// '0'/'1' characters, bit 0 first.
  std::string to_string() const;

  friend bool operator==(const BitString&, const BitString&) = default;

 private:
  std::vector<std::uint64_t> words_;
  std::size_t size_ = 0;
};

/// Incremental reader over a BitString.
class BitReader {
 public:
  explicit BitReader(const BitString& bits) : bits_(bits) {}
  double next_double();
  void next_doubles(double* out, std::size_t count);
  std::uint64_t next_bits(unsigned width);
  std::size_t position() const noexcept { return pos_; }

 private:
  const BitString& bits_;
  std::size_t pos_ = 0;
};

}  // namespace memlb
