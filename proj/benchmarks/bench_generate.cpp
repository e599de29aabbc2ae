#include <benchmark/benchmark.h>

#include "tacsim/scenarios.hpp"

using namespace tacsim;

namespace {

void BM_GenerateTaskII(benchmark::State& state) {
  TaskSpec task;
  task.kind = TaskKind::TaskII;
  const RandomizationSpec rnd{DynamicsParams{}, 0.2, true};
  const GenerationContext ctx = GenerationContext::make(task, rnd, RepKind::PinPositions, 1e-2);
  for (auto _ : state) benchmark::DoNotOptimize(generate_samples(ctx, state.range(0), 7));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GenerateTaskII)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_GenerateSimToSim(benchmark::State& state) {
  TaskSpec task;
  task.kind = TaskKind::SimToSim;
  const RandomizationSpec rnd{DynamicsParams{}, 0.2, true};
  const GenerationContext ctx = GenerationContext::make(task, rnd, RepKind::PinPositions, 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(generate_samples(ctx, state.range(0), 7));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GenerateSimToSim)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace
