#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>

// Deterministic randomness helpers. Draws go through fixed arithmetic on
// mt19937_64 outputs instead of std::*_distribution, whose results vary
// between standard library implementations; seeded runs must reproduce
// byte-identical output files.

namespace promptshield::rng {

// splitmix64 finalizer.
inline std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent per-item sub-seed, so items can be processed in any order
// (or in parallel) without changing results.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return mix(mix(master) ^ mix(stream + 0x632be59bd9b4e019ULL));
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Uniform draw in [0, n). n must be > 0. Modulo bias is negligible for the
// small bounds used here and keeps the mapping portable.
inline std::size_t bounded(std::mt19937_64& g, std::size_t n) {
  return static_cast<std::size_t>(g() % static_cast<std::uint64_t>(n));
}

// Uniform double in [0, 1).
inline double unit(std::mt19937_64& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

}  // namespace promptshield::rng
