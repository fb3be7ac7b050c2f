#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace swde {

//! SplitMix64 finaliser; used to derive independent substream seeds.
inline std::uint64_t splitmix64(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

//! Seed of the substream identified by `path` below the master seed. The
//! same (seed, path) always yields the same stream, whatever the order in
//! which substreams are created.
inline std::uint64_t substream_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path)
{
  std::uint64_t s = splitmix64(seed);
  for (std::uint64_t p : path)
    s = splitmix64(s ^ splitmix64(p + 0x632be59bd9b4e019ULL));
  return s;
}

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> path)
{
  return Rng(substream_seed(seed, path));
}

} // namespace swde
