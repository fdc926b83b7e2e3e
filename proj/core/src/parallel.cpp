#include "cylvar/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace cylvar {

namespace {

int read_thread_env() {
  if (const char* s = std::getenv("CYLVAR_THREADS")) {
    try {
      const int n = std::stoi(s);
      if (n >= 1) return std::min(n, 256);
    } catch (...) {
      // fall through to the default
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(std::min(hw, 256u));
}

bool read_deterministic_env() {
  const char* s = std::getenv("CYLVAR_DETERMINISTIC");
  return s != nullptr && std::string(s) == "1";
}

}  // namespace

int thread_count() {
  static const int n = read_thread_env();
  return n;
}

bool deterministic_mode() {
  static const bool on = read_deterministic_env();
  return on;
}

void parallel_for_ranges(std::size_t n,
                         const std::function<void(std::size_t, std::size_t)>& fn) {
  const int nt = thread_count();
  if (n == 0) return;
  if (nt == 1 || n < 1024) {
    fn(0, n);
    return;
  }
  const std::size_t workers = std::min<std::size_t>(nt, n);
  const std::size_t chunk = (n + workers - 1) / workers;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t b = w * chunk;
    const std::size_t e = std::min(n, b + chunk);
    if (b >= e) break;
    pool.emplace_back([&fn, b, e] { fn(b, e); });
  }
  for (auto& t : pool) t.join();
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  parallel_for_ranges(n, [&fn](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) fn(i);
  });
}

namespace {

double pairwise_rec(const double* v, std::size_t n) {
  if (n <= 32) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_rec(v, half) + pairwise_rec(v + half, n - half);
}

}  // namespace

double pairwise_sum(std::span<const double> v) {
  return pairwise_rec(v.data(), v.size());
}

}  // namespace cylvar
