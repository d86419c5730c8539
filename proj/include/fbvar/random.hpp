#pragma once

#include <cstdint>
#include <random>

namespace fbvar {

using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent generator for one task of one Gibbs block at one iteration.
/// The stream depends only on its coordinates, never on which thread runs it,
/// so serial and parallel schedules consume identical random numbers.
inline Rng substream(std::uint64_t seed, std::uint64_t iteration, std::uint64_t block, std::uint64_t task) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ iteration);
  h = splitmix64(h ^ (block << 32));
  h = splitmix64(h ^ task);
  return Rng(h);
}

inline double std_normal(Rng& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  return dist(rng);
}

inline double uniform01(Rng& rng) {
  // (0, 1): never returns 0 so log(u) is finite.
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace fbvar
