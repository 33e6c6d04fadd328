#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace uavnet {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives an independent stream from a base seed and a list of stream keys
/// (slot index, user index, purpose tag, ...).
inline std::uint64_t derive_seed(std::uint64_t seed,
                                 std::initializer_list<std::uint64_t> keys) {
  std::uint64_t h = splitmix64(seed);
  for (auto k : keys) h = splitmix64(h ^ splitmix64(k + 0x632be59bd9b4e019ULL));
  return h;
}

inline Rng make_rng(std::uint64_t seed,
                    std::initializer_list<std::uint64_t> keys = {}) {
  return Rng(derive_seed(seed, keys));
}

/// Uniform double in [0, 1) from the top 53 bits of one draw.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Stream tags keep the independent consumers of one run seed apart.
namespace stream {
inline constexpr std::uint64_t kTopology = 1;
inline constexpr std::uint64_t kTrace = 2;
inline constexpr std::uint64_t kRequests = 3;
inline constexpr std::uint64_t kPredictor = 4;
inline constexpr std::uint64_t kAgents = 5;
inline constexpr std::uint64_t kExploration = 6;
inline constexpr std::uint64_t kHistory = 7;
}  // namespace stream

}  // namespace uavnet
