#pragma once

#include <cstdint>

namespace gcm {

// SplitMix64 (Steele, Lea & Flood 2014; public-domain reference by Vigna):
//   z  = x + 0x9E3779B97F4A7C15
//   z  = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z  = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   out = z ^ (z >> 31)
// Used stateless here: every perturbation draw is a pure function of
// (seed, trial, row, column), so results do not depend on thread count,
// visiting order, or the platform's <random> implementation.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  std::uint64_t z = x + 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// splitmix64(splitmix64(splitmix64(splitmix64(seed) ^ trial) ^ row) ^ column)
constexpr std::uint64_t cell_key(std::uint64_t seed, std::uint64_t trial, std::uint64_t row,
                                 std::uint64_t column) noexcept {
  return splitmix64(splitmix64(splitmix64(splitmix64(seed) ^ trial) ^ row) ^ column);
}

/// Top 53 bits of the key scaled to [0, 1).
constexpr double unit_interval(std::uint64_t key) noexcept {
  return static_cast<double>(key >> 11) * 0x1.0p-53;
}

/// Uniform draw in [-amplitude, +amplitude) for one matrix cell of one trial.
constexpr double cell_noise(double amplitude, std::uint64_t seed, std::uint64_t trial, std::uint64_t row,
                            std::uint64_t column) noexcept {
  return amplitude * (2.0 * unit_interval(cell_key(seed, trial, row, column)) - 1.0);
}

}  // namespace gcm
