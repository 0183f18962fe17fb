#pragma once

#include <cstdint>
#include <random>

namespace greedy {

using Engine = std::mt19937_64;

/// SplitMix64 finaliser.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of stream `stream` derived from `master`. Streams are independent of scheduling.
constexpr std::uint64_t stream_seed(std::uint64_t master, std::uint64_t stream) {
  return splitmix64(splitmix64(master) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

inline Engine make_engine(std::uint64_t seed) { return Engine(splitmix64(seed)); }

inline Engine make_engine(std::uint64_t master, std::uint64_t stream) {
  return Engine(stream_seed(master, stream));
}

inline double uniform01(Engine& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

}  // namespace greedy
