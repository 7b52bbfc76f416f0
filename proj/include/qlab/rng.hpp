#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace qlab {

// Seeded generator used throughout the library. All variates are derived
// from raw 64-bit engine output with explicit transforms, so sequences are
// identical across standard library implementations.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  // splitmix64 finalizer applied to (seed, stream). Per-trial generators are
  // seeded with mix(master_seed, trial_index), so trials can run in any order.
  static std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t raw() { return eng_(); }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  // Uniform strictly inside (0, 1), safe for logs.
  double uniform_pos() {
    double u;
    do {
      u = uniform();
    } while (u <= 0.0);
    return u;
  }

  double exponential() { return -std::log(uniform_pos()); }

  // Marsaglia polar method; one spare cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

  // Standard complex normal: real and imaginary parts N(0, 1/2),
  // so E|z|^2 = 1.
  std::complex<double> complex_normal() {
    constexpr double inv_sqrt2 = 0.70710678118654752440;
    return {normal() * inv_sqrt2, normal() * inv_sqrt2};
  }

  // Uniform integer in [0, n), unbiased via rejection.
  std::size_t uniform_index(std::size_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = eng_();
    } while (x >= limit);
    return static_cast<std::size_t>(x % n);
  }

private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace qlab
