// Serial reference vs OpenMP run of one experiment grid, plus raw solver cost.

#include "mvbm/gen.hpp"
#include "mvbm/harness.hpp"
#include "mvbm/parallel.hpp"
#include "mvbm/solver.hpp"

#include <benchmark/benchmark.h>

using namespace mvbm;

namespace {

ExperimentConfig grid() {
    ExperimentConfig c = ExperimentConfig::defaults(ExperimentKind::PmaPmi);
    c.ns = {10, 15};
    c.ms = {100};
    c.ps = {0.2};
    c.capacities = {{1, 5}};
    c.iterations = 10;
    return c;
}

Instance market(int n, int m) {
    GenConfig c;
    c.n = n;
    c.m = m;
    c.p = 0.3;
    c.capacity_low = 1;
    c.capacity_high = 5;
    c.seed = 3;
    return generate_instance(c, 0);
}

void BM_ExperimentSerial(benchmark::State& state) {
    const auto cfg = grid();
    for (auto _ : state) benchmark::DoNotOptimize(run_experiment(cfg, 1));
}

void BM_ExperimentParallel(benchmark::State& state) {
    const auto cfg = grid();
    const int workers = default_workers();
    state.counters["workers"] = workers;
    for (auto _ : state) benchmark::DoNotOptimize(run_experiment(cfg, workers));
}

void BM_SolveBfs(benchmark::State& state) {
    const Instance inst = market(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
    for (auto _ : state) benchmark::DoNotOptimize(solve_mvbm(inst, Traversal::BreadthFirst));
}

void BM_SolveDfs(benchmark::State& state) {
    const Instance inst = market(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
    for (auto _ : state) benchmark::DoNotOptimize(solve_mvbm(inst, Traversal::DepthFirst));
}

void BM_SolveGreedy(benchmark::State& state) {
    const Instance inst = market(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
    for (auto _ : state) benchmark::DoNotOptimize(solve_ap(inst));
}

} // namespace

BENCHMARK(BM_ExperimentSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ExperimentParallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SolveBfs)->Args({20, 100})->Args({80, 400});
BENCHMARK(BM_SolveDfs)->Args({20, 100})->Args({80, 400});
BENCHMARK(BM_SolveGreedy)->Args({20, 100})->Args({80, 400});

BENCHMARK_MAIN();
