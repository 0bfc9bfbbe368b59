#include <benchmark/benchmark.h>

#include "moqa/ensemble.hpp"
#include "moqa/spectra.hpp"

namespace {

using namespace moqa;

void BM_EnumerateMax(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const MultiObjective mo = sample_instance(n, 6.0, 1);
    SpectrumOptions opts;
    opts.keep_values = false;
    opts.workers = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            enumerate_spectrum([&](Mask a) { return eval_max(mo, a); }, n, opts));
    }
}
BENCHMARK(BM_EnumerateMax)->Arg(10)->Arg(14)->Arg(18)->Unit(benchmark::kMillisecond);

void BM_VerifyRecovery(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const MultiObjective mo = sample_instance(n, 6.0, 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(verify_recovery(mo, 8));
    }
}
BENCHMARK(BM_VerifyRecovery)->Arg(10)->Arg(14)->Unit(benchmark::kMillisecond);

void BM_EpsilonDelta(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const MultiObjective mo = sample_instance(n, 120.0, 3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(epsilon_delta(mo, 8));
    }
}
BENCHMARK(BM_EpsilonDelta)->Arg(10)->Arg(14)->Unit(benchmark::kMillisecond);

void BM_SweepSmall(benchmark::State& state) {
    EnsembleConfig config;
    config.n = 8;
    config.gamma = 120.0;
    config.num_instances = 50;
    config.p_values = {1, 4, 8};
    config.workers = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(sweep(config));
    }
}
BENCHMARK(BM_SweepSmall)->Unit(benchmark::kMillisecond);

}  // namespace
