#include "memlb/bits.hpp"

#include <algorithm>
#include <bit>
#include <cstring>

#include "memlb/errors.hpp"

namespace memlb {

void BitString::set(std::size_t i, bool value) {
  const std::uint64_t mask = std::uint64_t{1} << (i % 64);
  if (value) {
    words_[i / 64] |= mask;
  } else {
    words_[i / 64] &= ~mask;
  }
}

void BitString::push_bits(std::uint64_t value, unsigned width) {
  if (width == 0) return;
  if (width < 64) value &= (std::uint64_t{1} << width) - 1;
  const std::size_t offset = size_ % 64;
  size_ += width;
  words_.resize((size_ + 63) / 64, 0);
  const std::size_t word = (size_ - width) / 64;
  words_[word] |= value << offset;
  if (offset != 0 && offset + width > 64) words_[word + 1] |= value >> (64 - offset);
}

void BitString::push_double(double value) { push_bits(std::bit_cast<std::uint64_t>(value), 64); }

void BitString::push_doubles(const double* values, std::size_t count) {
  if (size_ % 64 != 0) {
    for (std::size_t i = 0; i < count; ++i) push_double(values[i]);
    return;
  }
  const std::size_t first = size_ / 64;
  size_ += 64 * count;
  words_.resize(size_ / 64);
  std::memcpy(words_.data() + first, values, count * sizeof(double));
}

void BitString::read_doubles(std::size_t offset, double* out, std::size_t count) const {
  if (offset + 64 * count > size_) throw FormatError("bit read past end of string");
  if (offset % 64 != 0) {
    for (std::size_t i = 0; i < count; ++i) out[i] = read_double(offset + 64 * i);
    return;
  }
  std::memcpy(out, words_.data() + offset / 64, count * sizeof(double));
}

std::uint64_t BitString::read_bits(std::size_t offset, unsigned width) const {
  if (width == 0) return 0;
  if (offset + width > size_) throw FormatError("bit read past end of string");
  const std::size_t word = offset / 64;
  const std::size_t shift = offset % 64;
  std::uint64_t value = words_[word] >> shift;
  if (shift != 0 && shift + width > 64) value |= words_[word + 1] << (64 - shift);
  if (width < 64) value &= (std::uint64_t{1} << width) - 1;
  return value;
}

double BitString::read_double(std::size_t offset) const {
  return std::bit_cast<double>(read_bits(offset, 64));
}

bool BitString::all_zero() const noexcept {
  return std::all_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w == 0; });
}

std::string BitString::to_string() const {
  std::string out(size_, '0');
  for (std::size_t i = 0; i < size_; ++i) {
    if (get(i)) out[i] = '1';
  }
  return out;
}

double BitReader::next_double() {
  const double v = bits_.read_double(pos_);
  pos_ += 64;
  return v;
}

void BitReader::next_doubles(double* out, std::size_t count) {
  bits_.read_doubles(pos_, out, count);
  pos_ += 64 * count;
}

std::uint64_t BitReader::next_bits(unsigned width) {
  const std::uint64_t v = bits_.read_bits(pos_, width);
  pos_ += width;
  return v;
}

}  // namespace memlb
