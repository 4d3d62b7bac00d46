#pragma once

#include <cstdint>

namespace sinprod {

inline constexpr std::uint64_t default_seed = 0x5eed'1234'abcd'0042ULL;

/// Counter-based generator: every draw is a pure function of
/// (seed, stream, counter), so samples can be produced in any order and on
/// any number of threads with identical results.
class CounterRng {
 public:
  constexpr CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
      : key_(mix(seed ^ mix(stream + 0x9e37'79b9'7f4a'7c15ULL))) {}

  constexpr std::uint64_t bits(std::uint64_t counter) const noexcept {
    return mix(key_ + counter * 0x9e37'79b9'7f4a'7c15ULL);
  }

  /// Uniform in [0, 1) with 53 random bits.
  constexpr double uniform(std::uint64_t counter) const noexcept {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }

  /// Uniform in (-1, 1), never exactly zero.
  constexpr double symmetric_nonzero(std::uint64_t counter) const noexcept {
    std::uint64_t b = bits(counter);
    double mag = (static_cast<double>(b >> 12) + 0.5) * 0x1.0p-52;
    return (b & 1U) ? -mag : mag;
  }

  // splitmix64 finalizer
  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58'476d'1ce4'e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d0'49bb'1331'11ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t key_;
};

}  // namespace sinprod
