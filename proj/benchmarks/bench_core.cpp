// Microbenchmarks for the hot kernels: quadrature, differential operators,
// the cylindrical lift, and sphere-group transport.

#include <benchmark/benchmark.h>

#include <cmath>

#include "cylvar/conformal.hpp"
#include "cylvar/grid.hpp"
#include "cylvar/nonlinearity.hpp"
#include "cylvar/operators.hpp"

using namespace cylvar;

namespace {

ScalarField make_profile(const Grid2& g) {
  return sample_scalar(
      g, [](double r, double z) { return r * std::exp(-r * r - z * z); });
}

void BM_Integrate2(benchmark::State& state) {
  const Grid2 g(static_cast<int>(state.range(0)),
                2 * static_cast<int>(state.range(0)) + 1, 12.0, 12.0);
  const ScalarField u = make_profile(g);
  for (auto _ : state) benchmark::DoNotOptimize(integrate2(u));
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(u.v.size()));
}

void BM_Integrate3(benchmark::State& state) {
  const Grid3 g(static_cast<int>(state.range(0)), 12.0);
  Scalar3 s(g);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      for (int k = 0; k < g.n; ++k) {
        const double x = g.coord(i), y = g.coord(j), z = g.coord(k);
        s.at(i, j, k) = std::exp(-(x * x + y * y + z * z));
      }
  for (auto _ : state) benchmark::DoNotOptimize(integrate3(s));
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(s.v.size()));
}

void BM_Curl3(benchmark::State& state) {
  const Grid2 g2(48, 97, 12.0, 12.0);
  const Grid3 g3(static_cast<int>(state.range(0)), 12.0);
  const VectorField3 U = lift(make_profile(g2), g3);
  for (auto _ : state) {
    VectorField3 C = curl3(U);
    benchmark::DoNotOptimize(C.v.data());
  }
}

void BM_Lift(benchmark::State& state) {
  const Grid2 g2(48, 97, 12.0, 12.0);
  const Grid3 g3(static_cast<int>(state.range(0)), 12.0);
  const ScalarField u = make_profile(g2);
  for (auto _ : state) {
    VectorField3 U = lift(u, g3);
    benchmark::DoNotOptimize(U.v.data());
  }
}

void BM_ApplyA(benchmark::State& state) {
  const Grid2 g(static_cast<int>(state.range(0)),
                2 * static_cast<int>(state.range(0)) + 1, 12.0, 12.0);
  const ScalarField u = make_profile(g);
  for (auto _ : state) {
    ScalarField Au = apply_A(u, 1.0);
    benchmark::DoNotOptimize(Au.v.data());
  }
}

void BM_HaarAverage(benchmark::State& state) {
  const Grid3 g(static_cast<int>(state.range(0)), 12.0);
  const VectorField3 U = reference_symmetric_field(g);
  const int per_axis = static_cast<int>(state.range(1));
  for (auto _ : state) {
    VectorField3 S = haar_average(U, per_axis);
    benchmark::DoNotOptimize(S.v.data());
  }
}

void BM_GroupAct(benchmark::State& state) {
  const Grid3 g(static_cast<int>(state.range(0)), 12.0);
  const VectorField3 U = reference_symmetric_field(g);
  const GroupElement ge{0.7, 1.3};
  for (auto _ : state) {
    VectorField3 V = group_act(U, ge);
    benchmark::DoNotOptimize(V.v.data());
  }
}

}  // namespace

BENCHMARK(BM_Integrate2)->Arg(64)->Arg(128);
BENCHMARK(BM_Integrate3)->Arg(49)->Arg(97);
BENCHMARK(BM_Curl3)->Arg(49)->Arg(97);
BENCHMARK(BM_Lift)->Arg(49)->Arg(97);
BENCHMARK(BM_ApplyA)->Arg(64)->Arg(128);
BENCHMARK(BM_HaarAverage)->Args({33, 4})->Args({49, 4});
BENCHMARK(BM_GroupAct)->Arg(49)->Arg(97);

BENCHMARK_MAIN();
