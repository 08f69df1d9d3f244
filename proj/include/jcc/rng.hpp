#pragma once

#include <cstdint>
#include <random>

namespace jcc {

// Stream-splitting rule: every (seed, stream) pair maps to an independent
// mt19937_64 through a splitmix64-style finalizer. Streams are indexed by
// time step so per-step draws can run concurrently yet reproduce bit-exactly
// on any platform (mt19937_64 output is fully specified by the standard).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream) {
  return std::mt19937_64(mix_seed(seed, stream));
}

// Map a raw 64-bit word to the open interval (0,1). The top 53 bits give the
// mantissa; the half-step offset keeps both endpoints excluded.
inline double uniform_open(std::uint64_t word) {
  return (static_cast<double>(word >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace jcc
