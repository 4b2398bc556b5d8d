#pragma once

#include <cstdint>
#include <random>

namespace qns {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Independent seed for (stream, index) under a master seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index) {
  return splitmix64(splitmix64(master ^ splitmix64(stream)) + index);
}

/// Uniform on [0, 1) from the top 53 bits.
inline double uniform01(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

// Stream identifiers keep unrelated random draws decorrelated.
namespace streams {
inline constexpr std::uint64_t kDephasing = 1;
inline constexpr std::uint64_t kAmplitude = 2;
inline constexpr std::uint64_t kShots = 3;
inline constexpr std::uint64_t kBootstrap = 4;
inline constexpr std::uint64_t kTest = 5;
}  // namespace streams

}  // namespace qns
