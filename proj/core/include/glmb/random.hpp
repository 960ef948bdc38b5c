#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "glmb/error.hpp"

namespace glmb {

/// splitmix64 finalizer; used to derive independent seeds from (seed, index)
/// pairs so that parallel chains never share a stream.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
  return mix64(mix64(a) ^ b);
}

/// Deterministic random stream. The engine is the standard-specified
/// mt19937_64; all variates are derived here rather than through
/// std::*_distribution, so sequences are reproducible across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1), 53-bit resolution.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Integer uniform on {0, ..., n-1} by rejection; n > 0.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  /// Standard normal via Box-Muller (no cached second value).
  double normal() {
    const double u1 = 1.0 - uniform01();  // (0, 1], keeps log finite
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
  }

  bool bernoulli(double p) { return uniform01() < p; }

  /// Poisson by Knuth's product method; adequate for the rates used here.
  int poisson(double lambda) {
    if (lambda < 0.0) throw invalid_argument("poisson rate must be >= 0");
    if (lambda == 0.0) return 0;
    const double floor_p = std::exp(-lambda);
    int k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= uniform01();
    } while (p > floor_p);
    return k - 1;
  }

  /// Categorical draw by CDF inversion with a single uniform. Weights must be
  /// non-negative with positive sum; returns an index with weight > 0.
  int categorical(const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    if (!(total > 0.0)) throw numeric_failure("categorical weights sum to zero");
    double u = uniform01() * total;
    int last_positive = -1;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (weights[i] <= 0.0) continue;
      last_positive = static_cast<int>(i);
      u -= weights[i];
      if (u < 0.0) return last_positive;
    }
    return last_positive;  // u landed on the top edge; round down
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace glmb
