#pragma once

#include <cstdint>
#include <random>

#include "vislide/operators.hpp"

namespace vislide {

using Rng = std::mt19937_64;

/// Counter-based seed splitter: the same (master, stream) pair always yields
/// the same child seed, and distinct streams are decorrelated.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept;

/// Named streams for a master seed.
enum class SeedStream : std::uint64_t { instance = 1, start_point = 2, probe = 3, subsample = 4 };

inline std::uint64_t derive_seed(std::uint64_t master, SeedStream stream) noexcept {
  return derive_seed(master, static_cast<std::uint64_t>(stream));
}

Vector uniform_vector(Index dim, double lower, double upper, Rng& rng);
Vector gaussian_vector(Index dim, Rng& rng);

}  // namespace vislide
