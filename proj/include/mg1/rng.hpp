#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace mg1 {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Deterministic pseudo-random stream. Each chain owns one; streams derived
/// from the same base seed but different chain indices do not overlap in
/// practice (distinct mt19937_64 seedings via splitmix64).
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  static RandomStream for_chain(std::uint64_t seed, std::uint64_t chain) {
    return RandomStream(splitmix64(seed) ^ splitmix64(0xC2B2AE3D27D4EB4FULL * (chain + 1)));
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1); never returns 0 so log(u) is finite.
  double uniform_pos() {
    double u;
    do {
      u = uniform();
    } while (u == 0.0);
    return u;
  }

  double uniform_range(double lo, double hi) { return lo + uniform() * (hi - lo); }

  /// Standard normal via the Marsaglia polar method (spare value cached).
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double a, b, s;
    do {
      a = 2.0 * uniform() - 1.0;
      b = 2.0 * uniform() - 1.0;
      s = a * a + b * b;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = b * m;
    have_spare_ = true;
    return a * m;
  }

  double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

  int plus_minus_one() { return (next_u64() & 1u) ? 1 : -1; }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace mg1
