#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace cylvar {

// Number of worker threads for node-parallel loops. Reads CYLVAR_THREADS once
// (clamped to [1, 256]); defaults to the hardware concurrency.
int thread_count();

// True when CYLVAR_DETERMINISTIC=1. Reductions are bit-reproducible either
// way (fixed pairwise tree); the flag additionally pins run metadata that is
// inherently noisy, e.g. wall-clock time in manifests.
bool deterministic_mode();

// Apply fn(i) for i in [0, n). Work is chunked across thread_count() threads;
// fn must write only to locations owned by index i.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

// Chunked variant: fn(begin, end) on disjoint ranges, cheaper per element.
void parallel_for_ranges(std::size_t n,
                         const std::function<void(std::size_t, std::size_t)>& fn);

// Sum with a fixed pairwise tree over the given order. The tree shape depends
// only on the length, never on thread count, so results are bit-reproducible.
double pairwise_sum(std::span<const double> v);

}  // namespace cylvar
