#include <random>

#include <benchmark/benchmark.h>

#include "pvfc/grid.hpp"
#include "pvfc/weather.hpp"

namespace {

pvfc::WeatherGenConfig year_config() {
    pvfc::WeatherGenConfig cfg;
    cfg.seed = 1;
    cfg.end = pvfc::parse_date("2011-12-31");
    return cfg;
}

void BM_BilinearInterpolate(benchmark::State& state) {
    const auto obs = pvfc::generate_observations(year_config());
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> lat(35.0, 50.0);
    std::uniform_real_distribution<double> lon(5.0, 20.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(pvfc::bilinear_interpolate(obs.ssr, lat(rng), lon(rng)));
    }
}
BENCHMARK(BM_BilinearInterpolate);

void BM_GenerateObservations(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(pvfc::generate_observations(year_config()));
    }
}
BENCHMARK(BM_GenerateObservations)->Unit(benchmark::kMillisecond);

void BM_DegradeForecast(benchmark::State& state) {
    const auto obs = pvfc::generate_observations(year_config());
    pvfc::ForecastDegradationConfig fc;
    fc.seed = 2;
    for (auto _ : state) {
        benchmark::DoNotOptimize(pvfc::degrade_forecast(obs.ssr, static_cast<int>(state.range(0)), fc));
    }
}
BENCHMARK(BM_DegradeForecast)->Arg(1)->Arg(10)->Unit(benchmark::kMillisecond);

} // namespace
