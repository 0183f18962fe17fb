#include <benchmark/benchmark.h>

#include "greedy/estimators.hpp"
#include "greedy/parallel.hpp"

using namespace greedy;

namespace {

// One replica: a Poisson environment and a single path solve from the origin.
double replica(std::size_t j) {
  ProcessSpec p;
  const Point origin{0.0, 0.0};
  const auto r = sample_process(p, origin, 3.0, replica_seed(99, 0, j));
  return max_mass_path(r, PathQuery::from_origin(3.0, Norm::l2(2))).value;
}

void BM_serial(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(serial_replicas<double>(n, replica));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_parallel(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const int jobs = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(parallel_replicas<double>(n, jobs, replica));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_serial)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_parallel)->Args({64, 1})->Args({64, 2})->Args({64, 4})->Args({64, 8})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
