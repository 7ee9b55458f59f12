#pragma once

#include <cstdint>
#include <random>

namespace swarmkin {

using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed of the private stream of run `index` under `master_seed`. The split is
/// counter based, so any subset of runs can be re-executed in isolation.
constexpr std::uint64_t stream_seed(std::uint64_t master_seed, std::uint64_t index) {
  return splitmix64(master_seed ^ splitmix64(index ^ 0xD1B54A32D192ED03ULL));
}

inline Rng make_stream(std::uint64_t master_seed, std::uint64_t index) {
  return Rng(stream_seed(master_seed, index));
}

}  // namespace swarmkin
