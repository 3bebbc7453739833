#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace htgd {

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Derives an independent child seed from a parent seed and a path of
/// counters, e.g. derive_seed(master, {M, K, trial}). Each path element is
/// folded through splitmix64 so that neighbouring paths land far apart.
std::uint64_t derive_seed(std::uint64_t parent, std::initializer_list<std::uint64_t> path);

/// Engine used by every stochastic routine. Seeded from one 64-bit word.
using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed) { return Rng(splitmix64(seed)); }

}  // namespace htgd
