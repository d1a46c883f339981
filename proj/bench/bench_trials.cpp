#include <benchmark/benchmark.h>

#include "tcid/experiments.hpp"

namespace {

std::vector<tcid::TrialTask> make_tasks(std::size_t dim, std::size_t excess, std::size_t count) {
  std::vector<tcid::TrialTask> tasks;
  for (std::size_t t = 0; t < count; ++t) {
    tasks.push_back({dim, dim + excess, tcid::trial_seed(11, dim, excess, t)});
  }
  return tasks;
}

void BM_Trials(benchmark::State& state, tcid::Execution mode) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  const auto tasks = make_tasks(dim, 8, 16);
  const tcid::ExperimentConfig config;
  for (auto _ : state) {
    auto outcomes = tcid::run_trials(tasks, config, mode);
    benchmark::DoNotOptimize(outcomes.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(tasks.size()));
}

void BM_MergeOnly(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  tcid::CoderConfig coder{{tcid::TransformKind::Dct2, dim, 0},
                          {tcid::sample_log_uniform_steps(dim, 0.1, 10.0, 3)}};
  const auto sim = tcid::simulate(tcid::SourceSpec{0.9, 1e4, 5}, coder, dim + 8);
  for (auto _ : state) {
    auto g = tcid::lattice_from_generators(sim.observations);
    benchmark::DoNotOptimize(g.total_swaps);
  }
}

}  // namespace

BENCHMARK_CAPTURE(BM_Trials, serial, tcid::Execution::Serial)
    ->Arg(4)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK_CAPTURE(BM_Trials, parallel, tcid::Execution::Parallel)
    ->Arg(4)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_MergeOnly)->Arg(4)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
