#include <benchmark/benchmark.h>

#include "sensweep/tilt_engine.hpp"

static void TiltMultiplier(benchmark::State& state) {
    const std::int64_t n1 = state.range(0);
    const std::int64_t n_tilde = 3 * n1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(sensweep::tilt_multiplier(n_tilde, n1, 1.4, true));
    }
    state.SetComplexityN(n1);
}
BENCHMARK(TiltMultiplier)->RangeMultiplier(4)->Range(1, 1 << 14)->Complexity();

static void ProbBounds(benchmark::State& state) {
    const std::int64_t n1 = state.range(0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sensweep::prob_bounds(4 * n1, n1, 2.0));
    }
    state.SetComplexityN(n1);
}
BENCHMARK(ProbBounds)->RangeMultiplier(8)->Range(1, 1 << 12)->Complexity();

static void OverlapPmf(benchmark::State& state) {
    const std::int64_t n1 = state.range(0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sensweep::overlap_pmf(2 * n1 + 5, n1));
    }
}
BENCHMARK(OverlapPmf)->RangeMultiplier(8)->Range(1, 1 << 12);
