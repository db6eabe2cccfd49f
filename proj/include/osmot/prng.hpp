#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace osmot {

/// SplitMix64 (Steele, Lea, Flood 2014). One 64-bit word of state:
///   state += 0x9E3779B97F4A7C15
///   z = (state ^ (state >> 30)) * 0xBF58476D1CE4E5B9
///   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///   return z ^ (z >> 31)
/// uniform() takes the top 53 bits; normal() is Box-Muller using the cosine
/// branch only, so every normal consumes exactly two words.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  /// Independent generator for a named purpose: seeded by the first output
  /// of SplitMix64(seed ^ (stream · 0xD1B54A32D192ED03)).
  static SplitMix64 stream(std::uint64_t seed, std::uint64_t stream) {
    SplitMix64 g(seed ^ (stream * 0xD1B54A32D192ED03ULL));
    return SplitMix64(g.next());
  }

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  bool bernoulli(double p) { return uniform() < p; }

  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return static_cast<std::uint64_t>(uniform() * n); }

 private:
  std::uint64_t state_;
};

}  // namespace osmot
