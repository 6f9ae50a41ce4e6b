#include <benchmark/benchmark.h>

#include <cstdint>
#include <random>
#include <vector>

#include "sensweep/data_model.hpp"
#include "sensweep/inference.hpp"

namespace {

// many small strata, the regime the sweeps are built for
sensweep::StudySummary synthetic_summary(std::size_t strata) {
    std::mt19937_64 rng(99);
    sensweep::StudySummary sum;
    sum.informative_only = true;
    sum.strata.reserve(strata);
    for (std::size_t i = 0; i < strata; ++i) {
        sensweep::StratumSummary s;
        s.stratum_id = "s" + std::to_string(i);
        s.n1 = 1 + static_cast<std::int64_t>(rng() % 4);
        s.n0_obs = 1 + static_cast<std::int64_t>(rng() % 4);
        s.sum_y1 = static_cast<std::int64_t>(rng() % (s.n1 + 1));
        s.sum_y0 = static_cast<std::int64_t>(rng() % (s.n0_obs + 1));
        sum.strata.push_back(std::move(s));
    }
    return sum;
}

}  // namespace

static void GridSweep(benchmark::State& state) {
    const auto sum = synthetic_summary(static_cast<std::size_t>(state.range(0)));
    std::vector<double> rho{0.0, 0.2, 0.34};
    std::vector<double> gamma;
    for (double g = 1.0; g <= 1.5; g += 0.05) gamma.push_back(g);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            sensweep::grid_sweep(sum, rho, gamma, 0.0, +1, nullptr, 0));
    }
    state.SetItemsProcessed(state.iterations() * rho.size() * gamma.size());
}
BENCHMARK(GridSweep)->Arg(1000)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

static void ConfSetSweep(benchmark::State& state) {
    const auto sum = synthetic_summary(static_cast<std::size_t>(state.range(0)));
    std::vector<double> rho{0.34};
    std::vector<double> gamma;
    for (double g = 1.0; g <= 1.5; g += 0.01) gamma.push_back(g);
    std::vector<double> tau;
    for (double t = -0.2; t <= 0.4; t += 0.001) tau.push_back(t);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            sensweep::conf_set_sweep(sum, rho, gamma, tau, 0.05, nullptr, 0));
    }
    state.SetItemsProcessed(state.iterations() * gamma.size() * tau.size());
}
BENCHMARK(ConfSetSweep)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
