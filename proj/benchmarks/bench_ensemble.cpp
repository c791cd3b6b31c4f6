#include <benchmark/benchmark.h>

#include "chaosim/ensemble.hpp"

namespace {

using namespace chaosim;

void BM_FreeSpaceEnsemble(benchmark::State& state) {
  EnsembleSpec spec;
  spec.n_particles = static_cast<std::size_t>(state.range(0));
  spec.n_iterations = 100;
  spec.snapshot_every = static_cast<std::size_t>(state.range(1));
  spec.init = GaussianPosition{};
  for (auto _ : state) benchmark::DoNotOptimize(run_ensemble(spec, FreeSpace{}));
  state.SetItemsProcessed(state.iterations() * state.range(0) * 100);
}
BENCHMARK(BM_FreeSpaceEnsemble)->Args({10000, 100})->Args({10000, 1})->Unit(benchmark::kMillisecond);

void BM_SingleTrajectoryAccumulated(benchmark::State& state) {
  EnsembleSpec spec;
  spec.n_iterations = 100000;
  spec.snapshot_every = 100000;
  spec.params.K = 95.0 / 6.283185307179586;
  spec.accumulate = Accumulation{};
  for (auto _ : state) benchmark::DoNotOptimize(run_ensemble(spec, Annulus{}));
  state.SetItemsProcessed(state.iterations() * 100000);
}
BENCHMARK(BM_SingleTrajectoryAccumulated)->Unit(benchmark::kMillisecond);

}  // namespace
