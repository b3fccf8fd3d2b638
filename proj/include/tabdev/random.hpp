#pragma once

#include <cstdint>
#include <random>

namespace tabdev {

/// The engine used everywhere a seeded stream is needed.
using Engine = std::mt19937_64;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Seed for replication `rep` of cell `cell`; depends only on the indices,
/// never on scheduling order.
constexpr std::uint64_t child_seed(std::uint64_t master, std::uint64_t cell,
                                   std::uint64_t rep) noexcept {
  return mix64(mix64(mix64(master) ^ cell) ^ rep);
}

/// Uniform draw on the open interval (0, 1) from the top 53 bits.
template <class URBG>
double open_uniform(URBG& rng) {
  static_assert(sizeof(typename URBG::result_type) >= 8, "needs a 64-bit engine");
  const std::uint64_t bits = static_cast<std::uint64_t>(rng()) >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

}  // namespace tabdev
