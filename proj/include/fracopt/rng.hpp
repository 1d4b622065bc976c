#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace fracopt {

/// Seeded random source. Wraps std::mt19937_64 but derives doubles from raw
/// 64-bit draws so the stream is identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform index in [0, n). n must be positive.
  std::size_t uniform_index(std::size_t n) { return static_cast<std::size_t>(next_u64() % n); }

  /// Derives a decorrelated child seed (splitmix64 finalizer over the pair).
  static std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::mt19937_64 gen_;
};

/// Additive-recurrence (Weyl) sequence on [0,1)^dim: quasi-uniform,
/// deterministic, seedable through the start offsets.
class WeylSequence {
 public:
  WeylSequence(std::size_t dim, std::uint64_t seed) : increments_(dim), state_(dim) {
    // increments are fractional parts of sqrt(prime), a classic choice
    static constexpr int primes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37,
                                     41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89};
    Rng rng(seed);
    for (std::size_t i = 0; i < dim; ++i) {
      const double s = std::sqrt(static_cast<double>(primes[i % std::size(primes)]));
      increments_[i] = s - std::floor(s);
      state_[i] = rng.uniform01();
    }
  }

  const std::vector<double>& next() {
    for (std::size_t i = 0; i < state_.size(); ++i) {
      state_[i] += increments_[i];
      state_[i] -= std::floor(state_[i]);
    }
    return state_;
  }

 private:
  std::vector<double> increments_;
  std::vector<double> state_;
};

}  // namespace fracopt
