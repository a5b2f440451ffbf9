#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "sidiwo/tensor.hpp"

namespace sidiwo::rng {

// Seed derivation and sampling here avoid the standard distributions on
// purpose: their output is implementation-defined, and seeded runs must
// produce the same corpus on every platform. mt19937_64 itself is fully
// specified, as is the 53-bit uniform construction below.

inline uint64_t mix(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent stream for item `index` under a run-level seed.
inline std::mt19937_64 stream(uint64_t seed, uint64_t index) {
  return std::mt19937_64(mix(mix(seed) ^ mix(index + 1)));
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(std::mt19937_64& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

/// Standard normal via Box-Muller (portable, unlike std::normal_distribution).
inline double normal(std::mt19937_64& g) {
  double u1 = uniform01(g);
  while (u1 <= 0.0) u1 = uniform01(g);
  const double u2 = uniform01(g);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

/// Draw an index from a discrete distribution given its cumulative sums
/// (last entry may differ from 1 by rounding; draws clamp into range).
inline Index categorical(std::mt19937_64& g, const Vector& cumulative) {
  const double u = uniform01(g) * cumulative(cumulative.size() - 1);
  Index lo = 0, hi = cumulative.size() - 1;
  while (lo < hi) {
    const Index mid = (lo + hi) / 2;
    if (u < cumulative(mid))
      hi = mid;
    else
      lo = mid + 1;
  }
  return lo;
}

}  // namespace sidiwo::rng
