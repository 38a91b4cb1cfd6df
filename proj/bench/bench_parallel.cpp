// Serial (jobs = 1) against OpenMP (jobs > 1) for the three parallel loops.
// With a single core the parallel runs mostly measure scheduling overhead.

#include "larn/model_selection.hpp"
#include "larn/scalar_rule.hpp"
#include "larn/simbench.hpp"

#include <benchmark/benchmark.h>

#include <omp.h>

using namespace larn;

namespace {

void BM_CrossValidate(benchmark::State& state)
{
    SimConfig cfg;
    const SimInstance inst = generate_instance(cfg);
    CvGrid grid;
    grid.lambda_count = 20;
    grid.threshold_count = 20;
    const CvOptions opts{static_cast<int>(state.range(0)), true};
    for (auto _ : state) {
        benchmark::DoNotOptimize(cross_validate(inst.data, LarnConfig{}, grid, opts).best_error);
    }
}

void BM_MinimaxCheck(benchmark::State& state)
{
    std::vector<double> theta(1024, 0.0);
    for (std::size_t i = 512; i < theta.size(); ++i) theta[i] = 3.0;
    const ScalarPenalty pen = ScalarPenalty::depth_based(PenaltySpec{});
    for (auto _ : state) {
        benchmark::DoNotOptimize(minimax_check(theta, pen, 500, 1, static_cast<int>(state.range(0))).monte_carlo_risk);
    }
}

void BM_RunBenchmark(benchmark::State& state)
{
    SimConfig cfg;
    cfg.replications = 4;
    BenchmarkOptions opts;
    opts.grid.lambda_count = 20;
    opts.grid.threshold_count = 20;
    opts.jobs = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_benchmark(cfg, opts).size());
    }
}

void jobs_args(benchmark::internal::Benchmark* b)
{
    b->Arg(1);
    const int procs = omp_get_num_procs();
    if (procs > 1) b->Arg(procs);
    b->Arg(4);
    b->Unit(benchmark::kMillisecond)->UseRealTime();
}

} // namespace

BENCHMARK(BM_CrossValidate)->Apply(jobs_args);
BENCHMARK(BM_MinimaxCheck)->Apply(jobs_args);
BENCHMARK(BM_RunBenchmark)->Apply(jobs_args);

BENCHMARK_MAIN();
