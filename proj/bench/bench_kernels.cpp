// Serial reference vs OpenMP kernel for the three parallel hot paths.
// Arg 0 selects Exec::Serial, 1 Exec::Parallel.
#include <benchmark/benchmark.h>

#include "hbar/dynamics.hpp"
#include "hbar/integral_geometry.hpp"

using namespace hbar;

namespace {

Exec exec_of(const benchmark::State& s) { return s.range(0) ? Exec::Parallel : Exec::Serial; }

void BM_HtopCat(benchmark::State& state) {
  const auto sys = DynamicalSystem::linear_torus({{{2, 1}, {1, 1}}});
  for (auto _ : state)
    benchmark::DoNotOptimize(htop_estimate(sys, {0.25, 0.125}, 1, 5, 1 << 18, 3, exec_of(state)).value);
}

void BM_CroftonCircle(benchmark::State& state) {
  const auto lines = line_tomograph(2.0);
  const auto circle = regular_polygon({0, 0}, 1.0, 720);
  for (auto _ : state) benchmark::DoNotOptimize(crofton_mc(lines, circle, 100000, 3, exec_of(state)).integral);
}

void BM_PushforwardDensity(benchmark::State& state) {
  const auto lines = line_tomograph(2.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(pushforward_density(lines, 64, 200000, 3, exec_of(state)).max_fiber_volume());
}

}  // namespace

BENCHMARK(BM_HtopCat)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_CroftonCircle)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_PushforwardDensity)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
