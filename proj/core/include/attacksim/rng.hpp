#pragma once

#include <cassert>
#include <cstdint>
#include <limits>
#include <random>

namespace attacksim {

using Rng = std::mt19937_64;

// Uniform double in [0, 1) built from 53 random bits.  The standard
// distributions are implementation defined, so results would not be
// reproducible across standard libraries; this mapping is.
inline double uniform_double(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Unbiased uniform integer in [0, n), n > 0, via rejection sampling.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
  assert(n > 0);
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t limit = max - max % n;
  std::uint64_t v = rng();
  while (v >= limit) v = rng();
  return v % n;
}

inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  return static_cast<std::size_t>(uniform_below(rng, n));
}

// SplitMix64 style mixing used to derive independent seed streams
// (training, evaluation, generation) from one experiment seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace attacksim
