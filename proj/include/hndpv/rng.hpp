#pragma once

#include <cmath>
#include <cstdint>
#include <random>

// Seeded sampling helpers. std::uniform_real_distribution and
// std::poisson_distribution are implementation-defined, so scenario
// generation would not reproduce across standard libraries; these samplers
// consume mt19937_64 output directly and are portable.

namespace hndpv::rng {

// Uniform double in [0, 1), 53-bit resolution.
inline double uniform01(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& gen, double lo, double hi) {
  return lo + (hi - lo) * uniform01(gen);
}

namespace detail {

// Knuth's product-of-uniforms method, O(lambda) draws.
inline long poisson_small(std::mt19937_64& gen, double lambda) {
  const double limit = std::exp(-lambda);
  double prod = uniform01(gen);
  long k = 0;
  while (prod > limit) {
    prod *= uniform01(gen);
    ++k;
  }
  return k;
}

// Hormann's PTRS transformed-rejection sampler for large rates.
inline long poisson_ptrs(std::mt19937_64& gen, double lambda) {
  const double slam = std::sqrt(lambda);
  const double loglam = std::log(lambda);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = uniform01(gen) - 0.5;
    const double v = uniform01(gen);
    const double us = 0.5 - std::abs(u);
    const double k = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<long>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
        k * loglam - lambda - std::lgamma(k + 1.0)) {
      return static_cast<long>(k);
    }
  }
}

} // namespace detail

inline long poisson(std::mt19937_64& gen, double lambda) {
  if (lambda <= 0.0) return 0;
  if (lambda < 30.0) return detail::poisson_small(gen, lambda);
  return detail::poisson_ptrs(gen, lambda);
}

} // namespace hndpv::rng
