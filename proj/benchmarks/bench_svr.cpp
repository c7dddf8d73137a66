#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "pvfc/cross_validation.hpp"
#include "pvfc/svr.hpp"

namespace {

std::vector<pvfc::Sample> plant_like(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ssr(800.0, 8500.0);
    std::normal_distribution<double> temp(14.0, 8.0);
    std::normal_distribution<double> noise(0.0, 0.04);
    std::vector<pvfc::Sample> out(n);
    for (auto& s : out) {
        s.ssr = ssr(rng);
        s.t = temp(rng);
        const double derate = 1.0 - 0.025 * std::max(0.0, s.t - 15.0);
        s.y = 4.0 * s.ssr / 6000.0 * derate * (1.0 + noise(rng));
    }
    return out;
}

void BM_RbfKernelMatrix(benchmark::State& state) {
    const auto s = plant_like(static_cast<std::size_t>(state.range(0)), 1);
    const auto x = pvfc::Scaler::fit(s).transform(s);
    for (auto _ : state) {
        benchmark::DoNotOptimize(pvfc::rbf_kernel_matrix(x, 1.0));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_RbfKernelMatrix)->Arg(128)->Arg(256)->Arg(512)->Complexity(benchmark::oNSquared);

void BM_FitSvr(benchmark::State& state) {
    const auto s = plant_like(static_cast<std::size_t>(state.range(0)), 2);
    const pvfc::SvrHyperParams hp{static_cast<double>(state.range(1)), 0.01, 1.0};
    for (auto _ : state) {
        benchmark::DoNotOptimize(pvfc::fit_svr(s, hp));
    }
}
BENCHMARK(BM_FitSvr)->Args({200, 1})->Args({200, 100})->Args({600, 1})->Args({600, 100})->Unit(benchmark::kMillisecond);

void BM_GridSearchStandard(benchmark::State& state) {
    const auto s = plant_like(static_cast<std::size_t>(state.range(0)), 3);
    const pvfc::SearchGrid grid = pvfc::SearchGrid::standard();
    for (auto _ : state) {
        benchmark::DoNotOptimize(pvfc::grid_search(s, grid, pvfc::CvConfig{10, 1}));
    }
}
BENCHMARK(BM_GridSearchStandard)->Arg(650)->Unit(benchmark::kSecond)->Iterations(1);

} // namespace

BENCHMARK_MAIN();
