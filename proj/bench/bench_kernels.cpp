// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <vector>

#include "kerr_bic/parallel.hpp"
#include "kerr_bic/sensitivity.hpp"
#include "kerr_bic/spectra.hpp"
#include "kerr_bic/steady_state.hpp"

namespace {

using namespace kerr_bic;

std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t k = 0; k < n; ++k) v[k] = a + (b - a) * static_cast<double>(k) / static_cast<double>(n - 1);
    return v;
}

TwoModeParams coupled() {
    TwoModeParams p;
    p.delta_a = 4.0;
    p.g = 4.0;
    return p;
}

void steady_serial(benchmark::State& state) {
    const KerrSystem sys = TwoModeSystem{coupled()};
    const auto grid = linspace(0.5, 30.0, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(parallel::steady_grid_serial(sys, grid));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void steady_openmp(benchmark::State& state) {
    const KerrSystem sys = TwoModeSystem{coupled()};
    const auto grid = linspace(0.5, 30.0, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(parallel::steady_grid(sys, grid));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void profile_serial(benchmark::State& state) {
    const KerrSystem sys = SingleModeSystem{-3.0, 1.0};
    const auto grid = linspace(0.5, 5.0, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(sensitivity_profile(sys, grid, Branch::Lower));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void profile_openmp(benchmark::State& state) {
    const KerrSystem sys = SingleModeSystem{-3.0, 1.0};
    const auto grid = linspace(0.5, 5.0, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(parallel::sensitivity_profile(sys, grid, Branch::Lower));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void locus_serial(benchmark::State& state) {
    const auto grid = linspace(-10.0, 10.0, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(bic_locus(coupled(), grid));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void locus_openmp(benchmark::State& state) {
    const auto grid = linspace(-10.0, 10.0, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(parallel::bic_locus(coupled(), grid));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(steady_serial)->RangeMultiplier(8)->Range(64, 32768);
BENCHMARK(steady_openmp)->RangeMultiplier(8)->Range(64, 32768)->UseRealTime();
BENCHMARK(profile_serial)->RangeMultiplier(8)->Range(64, 32768);
BENCHMARK(profile_openmp)->RangeMultiplier(8)->Range(64, 32768)->UseRealTime();
BENCHMARK(locus_serial)->RangeMultiplier(8)->Range(64, 4096);
BENCHMARK(locus_openmp)->RangeMultiplier(8)->Range(64, 4096)->UseRealTime();

BENCHMARK_MAIN();
