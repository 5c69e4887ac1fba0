#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace memlb {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define MEMLB_DEFINE_ERROR(Name)          \
  class Name : public Error {             \
   public:                                \
    using Error::Error;                   \
  }

// instance
MEMLB_DEFINE_ERROR(NonEvenDimension);
MEMLB_DEFINE_ERROR(DeltaOutOfRange);
MEMLB_DEFINE_ERROR(OverrideViolatesInvariant);
MEMLB_DEFINE_ERROR(NormTooLarge);

// optimizer / instrument
MEMLB_DEFINE_ERROR(DegenerateEllipsoid);
MEMLB_DEFINE_ERROR(InstanceMismatch);
MEMLB_DEFINE_ERROR(PreconditionViolated);

// game
MEMLB_DEFINE_ERROR(MessageLengthViolation);
MEMLB_DEFINE_ERROR(RowNotInMatrix);
MEMLB_DEFINE_ERROR(OutputOutOfBall);

// geometry
MEMLB_DEFINE_ERROR(NonUnitInput);
MEMLB_DEFINE_ERROR(NotRli);
MEMLB_DEFINE_ERROR(NotOrthonormal);

// encoding
MEMLB_DEFINE_ERROR(DegenerateSchedule);

// io / config
MEMLB_DEFINE_ERROR(FormatError);
MEMLB_DEFINE_ERROR(ConfigError);

#undef MEMLB_DEFINE_ERROR

/// Raised when the harness sees a memory state whose length differs from the
/// algorithm's declared size.
class StateSizeViolation : public Error {
 public:
  StateSizeViolation(std::size_t round, std::size_t expected, std::size_t actual)
      : Error("state size violation at round " + std::to_string(round) + ": expected " +
              std::to_string(expected) + " bits, got " + std::to_string(actual)),
        round_(round) {}
  std::size_t round() const noexcept { return round_; }

 private:
  std::size_t round_;
};

class QueryOutOfBall : public Error {
 public:
  QueryOutOfBall(std::size_t round, double norm)
      : Error("query outside the unit ball at round " + std::to_string(round) +
              " (norm " + std::to_string(norm) + ")"),
        round_(round) {}
  std::size_t round() const noexcept { return round_; }

 private:
  std::size_t round_;
};

/// An exhaustive loop would exceed its configured cap. `loop()` names the loop.
class CapExceeded : public Error {
 public:
  CapExceeded(std::string loop, double requested, double cap)
      : Error("cap exceeded in " + loop + ": requested " + std::to_string(requested) +
              " > cap " + std::to_string(cap)),
        loop_(std::move(loop)) {}
  const std::string& loop() const noexcept { return loop_; }

 private:
  std::string loop_;
};

/// Table enumeration over (rows ∪ {nil})^n × V exceeds the configured cap.
class EnumerationCapExceeded : public CapExceeded {
 public:
  using CapExceeded::CapExceeded;
};

}  // namespace memlb
