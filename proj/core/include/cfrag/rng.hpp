#pragma once

#include <cstdint>
#include <random>

namespace cfrag {

/// SplitMix64 finalizer. Pure function used for seed derivation.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed of trajectory `index` within an ensemble started from `master`:
/// splitmix64(master + 0x9E3779B97F4A7C15 * (index + 1)).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept;

/// Seedable random source with a platform-stable stream.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. None of the std:: distributions are used (their algorithms are
/// implementation-defined); every variate below is built from raw 64-bit
/// words so that a given seed yields the same draws on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Exponential with the given rate (> 0), by inversion.
  double exponential(double rate);

  bool bernoulli(double p) { return uniform() < p; }

  /// Binomial(n, p). Exact: n Bernoulli trials, or popcounts of raw words
  /// when p == 1/2.
  std::uint64_t binomial(std::uint64_t n, double p);

  /// Uniform integer in [0, bound), bound > 0 (Lemire's multiply-shift with
  /// rejection).
  std::uint64_t below(std::uint64_t bound);

 private:
  std::mt19937_64 engine_;
};

}  // namespace cfrag
