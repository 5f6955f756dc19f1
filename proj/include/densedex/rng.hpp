#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace densedex {

// Deterministic helpers on top of std::mt19937_64. The raw engine output is
// standardized, so deriving values explicitly (instead of going through
// std::uniform_*_distribution) keeps results identical across toolchains.

// Uniform double in [0, 1) with 53 bits of resolution.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_in(std::mt19937_64& rng, double lo, double hi) {
  return lo + uniform01(rng) * (hi - lo);
}

// Unbiased integer in [0, n) via rejection sampling.
inline uint64_t uniform_index(std::mt19937_64& rng, uint64_t n) {
  const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

template <typename T>
void shuffle_vec(std::vector<T>& v, std::mt19937_64& rng) {
  for (size_t i = v.size(); i > 1; --i) {
    const size_t j = static_cast<size_t>(uniform_index(rng, i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace densedex
