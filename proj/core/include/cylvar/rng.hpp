#pragma once

#include <cstdint>
#include <utility>

namespace cylvar {

// Stateless counter-based generator: the k-th draw of a stream is a pure
// function of (seed, k), so parallel consumers can sample disjoint index
// ranges and still produce the exact sequence a serial run would.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  // 64 uniform bits for draw index k.
  std::uint64_t bits(std::uint64_t k) const;

  // Uniform double in [0, 1).
  double uniform(std::uint64_t k) const;

  // Uniform double in [lo, hi).
  double uniform(std::uint64_t k, double lo, double hi) const;

  // Standard normal via Box-Muller on draws (2k, 2k+1) of a derived stream.
  double normal(std::uint64_t k) const;

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
};

}  // namespace cylvar
