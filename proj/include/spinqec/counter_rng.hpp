#pragma once

#include <cstdint>

namespace spinqec {

// Counter-based uniform stream: each variate is a pure function of
// (seed, realization index, bond index), so Monte Carlo ensembles are
// reproducible independently of evaluation order or thread count.

inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t index,
                                  std::uint64_t sub) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ index);
  return splitmix64(h ^ sub);
}

/// Uniform double in [0, 1) from the top 53 bits of the hash.
inline double counter_uniform01(std::uint64_t seed, std::uint64_t index,
                                std::uint64_t sub) {
  return static_cast<double>(counter_hash(seed, index, sub) >> 11) *
         0x1.0p-53;
}

/// Uniform double in [-half_width, half_width).
inline double counter_uniform_symmetric(std::uint64_t seed,
                                        std::uint64_t index,
                                        std::uint64_t sub,
                                        double half_width) {
  return half_width * (2.0 * counter_uniform01(seed, index, sub) - 1.0);
}

}  // namespace spinqec
