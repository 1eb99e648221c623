#include "vislide/rng.hpp"

namespace vislide {

namespace {

// splitmix64 finalizer
std::uint64_t mix(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept {
  return mix(mix(master) ^ (stream * 0xd1b54a32d192ed03ULL));
}

Vector uniform_vector(Index dim, double lower, double upper, Rng& rng) {
  std::uniform_real_distribution<double> dist(lower, upper);
  Vector v(dim);
  for (Index i = 0; i < dim; ++i) v[i] = dist(rng);
  return v;
}

Vector gaussian_vector(Index dim, Rng& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Vector v(dim);
  for (Index i = 0; i < dim; ++i) v[i] = dist(rng);
  return v;
}

}  // namespace vislide
