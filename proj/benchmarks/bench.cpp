#include <benchmark/benchmark.h>

#include <cmath>

#include "fearbif/hopf.hpp"
#include "fearbif/hopf_hopf.hpp"
#include "fearbif/linear_stability.hpp"
#include "fearbif/simulator.hpp"

using namespace fearbif;

static void BM_Simulate(benchmark::State& state) {
  const ModelParams p = ModelParams::reference(0.4, 25.0);
  SimulationOptions o;
  o.grid.M = static_cast<int>(state.range(0));
  o.grid.T = 200.0;
  o.max_snapshots = 0;
  for (auto _ : state) {
    const Field f = simulate(
        p, [](double x, double) { return 1.25 + 0.02 * std::cos(x); },
        [](double x, double) { return 0.1 + 0.02 * std::cos(x); }, o);
    benchmark::DoNotOptimize(f.u_final.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(std::lround(o.grid.T / 0.01)));
}
BENCHMARK(BM_Simulate)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);

static void BM_StabilityWindows(benchmark::State& state) {
  const ModelParams p = ModelParams::reference(1.0);
  for (auto _ : state) benchmark::DoNotOptimize(stability_windows(p, 45.0).windows.size());
}
BENCHMARK(BM_StabilityWindows);

static void BM_HopfReport(benchmark::State& state) {
  const ModelParams p = ModelParams::reference(0.12);
  for (auto _ : state) benchmark::DoNotOptimize(hopf_report(p, 0, 0, Branch::plus).classification.mu2);
}
BENCHMARK(BM_HopfReport);

static void BM_HopfHopfCoefficients(benchmark::State& state) {
  const ModelParams p = ModelParams::reference(0.1606);
  const ModeData md = mode_data(p, 0);
  const HHEigendata eig = hh_eigendata(p, 42.5794, *md.omega_plus, *md.omega_minus);
  for (auto _ : state) benchmark::DoNotOptimize(unfolding(hh_coefficients(p, eig)).det);
}
BENCHMARK(BM_HopfHopfCoefficients);

BENCHMARK_MAIN();
