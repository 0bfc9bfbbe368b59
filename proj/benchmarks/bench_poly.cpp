#include <benchmark/benchmark.h>

#include <random>

#include "moqa/poly.hpp"

namespace {

using namespace moqa;

Polynomial random_qubo_like(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<RawTerm> terms;
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            terms.push_back({{i, j}, gauss(rng)});
        }
        terms.push_back({{i}, gauss(rng)});
    }
    return make_poly(n, terms);
}

void BM_Multiply(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Polynomial a = random_qubo_like(n, 1);
    const Polynomial b = random_qubo_like(n, 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(multiply(a, b));
    }
}
BENCHMARK(BM_Multiply)->Arg(8)->Arg(12)->Arg(16);

void BM_Power(benchmark::State& state) {
    const int n = 10;
    const int p = static_cast<int>(state.range(0));
    const Polynomial a = random_qubo_like(n, 3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(power(a, p));
    }
}
BENCHMARK(BM_Power)->Arg(2)->Arg(4)->Arg(6);

void BM_EvaluateMask(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Polynomial a = random_qubo_like(n, 4);
    Mask assignment = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(a.evaluate_mask(assignment));
        assignment = (assignment + 0x9E3779B9u) & ((Mask{1} << n) - 1);
    }
}
BENCHMARK(BM_EvaluateMask)->Arg(12)->Arg(20);

void BM_ToIsing(benchmark::State& state) {
    const Polynomial a = power(random_qubo_like(8, 5), 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(to_ising(a));
    }
}
BENCHMARK(BM_ToIsing);

}  // namespace
