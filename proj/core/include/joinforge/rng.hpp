#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace joinforge {

// Seeded generator whose output depends only on the seed: raw mt19937_64
// words are mapped to doubles and integers here instead of through the
// implementation-defined std distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // exp(uniform(log lo, log hi)).
  double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }

  // Uniform integer in [lo, hi].
  std::uint64_t integer(std::uint64_t lo, std::uint64_t hi) {
    const std::uint64_t span = hi - lo + 1;
    if (span == 0) return engine_();
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t draw = engine_();
    while (draw >= limit) draw = engine_();
    return lo + draw % span;
  }

  bool bernoulli(double probability) { return uniform() < probability; }

  // Standard exponential variate, strictly positive.
  double exponential() { return -std::log1p(-uniform()) + 0x1.0p-60; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace joinforge
