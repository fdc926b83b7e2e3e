#include "cylvar/rng.hpp"

#include <cmath>

namespace cylvar {

namespace {

// splitmix64 finalizer: a high-quality 64-bit mix.
std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t CounterRng::bits(std::uint64_t k) const {
  // Two mixing rounds decorrelate (seed, k) lattice structure.
  return mix(mix(seed_ ^ 0x8000000000000000ULL) + k);
}

double CounterRng::uniform(std::uint64_t k) const {
  // Top 53 bits -> [0, 1).
  return static_cast<double>(bits(k) >> 11) * 0x1.0p-53;
}

double CounterRng::uniform(std::uint64_t k, double lo, double hi) const {
  return lo + (hi - lo) * uniform(k);
}

double CounterRng::normal(std::uint64_t k) const {
  const double u1 = uniform(2 * k);
  const double u2 = uniform(2 * k + 1);
  // Shift u1 away from zero so log stays finite.
  const double r = std::sqrt(-2.0 * std::log(1.0 - u1));
  return r * std::cos(2.0 * 3.14159265358979323846 * u2);
}

}  // namespace cylvar
