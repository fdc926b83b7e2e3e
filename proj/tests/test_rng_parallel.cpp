#include <atomic>
#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"

#include "cylvar/parallel.hpp"
#include "cylvar/rng.hpp"

using namespace cylvar;

TEST_SUITE("rng_parallel") {

TEST_CASE("counter stream is a pure function of (seed, index)") {
  CounterRng a(42), b(42), c(43);
  for (std::uint64_t k : {0ull, 1ull, 2ull, 1000ull, (1ull << 40)}) {
    CHECK(a.bits(k) == b.bits(k));
    CHECK(a.uniform(k) == b.uniform(k));
    CHECK(a.normal(k) == b.normal(k));
  }
  int differing = 0;
  for (std::uint64_t k = 0; k < 64; ++k) differing += a.bits(k) != c.bits(k);
  CHECK(differing > 60);
}

TEST_CASE("uniform draws respect their ranges") {
  CounterRng rng(7);
  double lo = 1.0, hi = 0.0;
  for (std::uint64_t k = 0; k < 20000; ++k) {
    const double u = rng.uniform(k);
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    const double v = rng.uniform(k, -3.0, 5.0);
    CHECK(v >= -3.0);
    CHECK(v < 5.0);
  }
  CHECK(lo < 0.01);   // the stream actually covers the interval
  CHECK(hi > 0.99);
}

TEST_CASE("normal moments on a large sample") {
  CounterRng rng(2026);
  const int n = 100000;
  double sum = 0.0, sumsq = 0.0;
  for (int k = 0; k < n; ++k) {
    const double x = rng.normal(static_cast<std::uint64_t>(k));
    sum += x;
    sumsq += x * x;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  CHECK(std::abs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));
  CHECK(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("parallel_for visits every index exactly once") {
  const std::size_t n = 10007;  // prime, forces ragged chunks
  std::vector<std::atomic<int>> hits(n);
  parallel_for(n, [&](std::size_t i) { hits[i].fetch_add(1); });
  for (std::size_t i = 0; i < n; ++i) CHECK(hits[i].load() == 1);

  std::vector<std::atomic<int>> hits2(n);
  parallel_for_ranges(n, [&](std::size_t b, std::size_t e) {
    CHECK(b < e);
    for (std::size_t i = b; i < e; ++i) hits2[i].fetch_add(1);
  });
  for (std::size_t i = 0; i < n; ++i) CHECK(hits2[i].load() == 1);
}

TEST_CASE("pairwise sum: accurate and order-deterministic") {
  CounterRng rng(5);
  std::vector<double> v(12345);
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = rng.uniform(i, -1.0, 1.0) * std::pow(10.0, rng.uniform(9999 + i, -8.0, 8.0));

  long double ref = 0.0L;
  for (double x : v) ref += static_cast<long double>(x);

  const double s1 = pairwise_sum(v);
  const double s2 = pairwise_sum(v);
  CHECK(s1 == s2);

  long double scale = 0.0L;
  for (double x : v) scale += std::abs(static_cast<long double>(x));
  CHECK(std::abs(static_cast<double>(ref - static_cast<long double>(s1))) <=
        1e-12 * static_cast<double>(scale));
}

TEST_CASE("thread count is sane") {
  CHECK(thread_count() >= 1);
  CHECK(thread_count() <= 256);
}

}  // TEST_SUITE
