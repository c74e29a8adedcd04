#pragma once

#include <cstdint>
#include <random>

namespace ripcert::rng {

/// SplitMix64 finalizer; used as a one-shot bit mixer.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Stream-derivation rule: child = mix64(master ^ mix64(index)).
///
/// Every logical unit of work (matrix row, trial, Monte-Carlo chunk) owns the
/// stream named by its index, so batch output never depends on how the units
/// were scheduled across threads. Nested units derive again from the child.
inline std::uint64_t derive_stream(std::uint64_t master, std::uint64_t index) {
  return mix64(master ^ mix64(index));
}

/// One pseudo-random stream. Wraps a mt19937_64 engine seeded with a derived
/// 64-bit value plus the distributions the samplers need.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double u01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double gauss() { return normal_(eng_); }

  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) {
    return std::uniform_int_distribution<std::uint64_t>(0, bound - 1)(eng_);
  }

  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
  std::normal_distribution<double> normal_{};
};

/// Maps a probability to a 64-bit acceptance threshold: P(next_u64() < t) is
/// p up to 2^-64. Keeps Bernoulli-style draws to a single integer compare.
inline std::uint64_t probability_threshold(double p) {
  if (p <= 0.0) return 0;
  long double t = static_cast<long double>(p) * 18446744073709551616.0L;
  if (t >= 18446744073709551615.0L) return UINT64_MAX;
  return static_cast<std::uint64_t>(t);
}

}  // namespace ripcert::rng
