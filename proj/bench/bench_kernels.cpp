#include <benchmark/benchmark.h>

#include "anderson_dp/anderson.hpp"
#include "anderson_dp/bellman_parallel.hpp"
#include "anderson_dp/experiment.hpp"
#include "anderson_dp/garnet.hpp"

using namespace anderson_dp;

namespace {

Mdp bench_mdp(std::size_t states) {
    GarnetSpec spec;
    spec.num_states = states;
    spec.num_actions = 4;
    spec.branching = 3;
    return generate_garnet(spec);
}

void BM_BellmanOptSerial(benchmark::State& state) {
    const auto mdp = bench_mdp(static_cast<std::size_t>(state.range(0)));
    const Vector v = Vector::LinSpaced(mdp.num_states(), 0.0, 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(bellman_opt(mdp, v));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_BellmanOptParallel(benchmark::State& state) {
    const auto mdp = bench_mdp(static_cast<std::size_t>(state.range(0)));
    const Vector v = Vector::LinSpaced(mdp.num_states(), 0.0, 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(bellman_opt_parallel(mdp, v));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SolveAlpha(benchmark::State& state) {
    const Matrix d = Matrix::Random(100, state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(solve_alpha(d));
}

// Reduced study; the argument is the thread count (0 = OpenMP default).
void BM_Experiment(benchmark::State& state) {
    ExperimentConfig config;
    config.num_mdps = 8;
    config.num_iters = 100;
    config.threads = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(run_experiment(config));
}

}  // namespace

BENCHMARK(BM_BellmanOptSerial)->Arg(100)->Arg(10'000)->Arg(200'000);
BENCHMARK(BM_BellmanOptParallel)->Arg(100)->Arg(10'000)->Arg(200'000);
BENCHMARK(BM_SolveAlpha)->DenseRange(2, 10, 4);
BENCHMARK(BM_Experiment)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
