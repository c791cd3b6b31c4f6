#include <benchmark/benchmark.h>

#include <vector>

#include "chaosim/counter_rng.hpp"
#include "chaosim/maps.hpp"
#include "chaosim/scenarios.hpp"
#include "chaosim/stats.hpp"

namespace {

using namespace chaosim;

void BM_Step(benchmark::State& state) {
  MapParams p;
  p.K = 95.0 / kTwoPi;
  TrajectoryState s{0.1, 0.0, 0.0, 0.1, 1};
  for (auto _ : state) {
    s = step(s, p, StepMode::Raw);
    benchmark::DoNotOptimize(s);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Step);

void BM_AdvanceBox(benchmark::State& state) {
  MapParams p;
  p.K = static_cast<double>(state.range(0));
  const Box box;
  TrajectoryState s{0.3, 0.7, 0.0, 0.1, 1};
  for (auto _ : state) {
    s = advance_box(s, p, box);
    benchmark::DoNotOptimize(s);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_AdvanceBox)->Arg(0)->Arg(10)->Arg(1000);

void BM_Moments(benchmark::State& state) {
  const CounterRng rng(1);
  std::vector<double> xs(static_cast<std::size_t>(state.range(0)));
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = rng.normal(0, 2 * i, 0.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(moments(xs));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Moments)->Arg(1000)->Arg(100000);

}  // namespace
