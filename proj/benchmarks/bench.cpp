#include <benchmark/benchmark.h>

#include <cmath>

#include "resvol/hypsometry.hpp"
#include "resvol/random.hpp"
#include "resvol/regression.hpp"
#include "resvol/segmentation.hpp"
#include "resvol/synth.hpp"

using namespace resvol;

static void BM_Otsu(benchmark::State& state) {
    Rng rng(1);
    Histogram h;
    h.lo = -1.0;
    h.hi = 1.0;
    h.counts.resize(static_cast<std::size_t>(state.range(0)));
    for (auto& c : h.counts) c = rng.below(100000);
    for (auto _ : state) benchmark::DoNotOptimize(otsu(h));
}
BENCHMARK(BM_Otsu)->Arg(256)->Arg(4096);

static void BM_SvrFit(benchmark::State& state) {
    Rng rng(2);
    std::vector<SvrSample> samples;
    for (long i = 0; i < state.range(0); ++i) {
        const double x = rng.uniform();
        samples.push_back({x, x * x * x + rng.uniform(-0.01, 0.01)});
    }
    const SvrHyperparams hp{100.0, 0.001, 3.0};
    for (auto _ : state) benchmark::DoNotOptimize(svr_fit(samples, hp));
}
BENCHMARK(BM_SvrFit)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

static void BM_NnInterpolate(benchmark::State& state) {
    Rng rng(3);
    const auto n = static_cast<std::size_t>(state.range(0));
    std::vector<Sounding> pts;
    for (std::size_t i = 0; i < 2000; ++i) pts.push_back({rng.uniform(0, 3000), rng.uniform(0, 3000), rng.uniform(800, 860)});
    const SoundingSet set(pts);
    const GridShape shape{n, n, 3000.0 / static_cast<double>(n)};
    for (auto _ : state) benchmark::DoNotOptimize(nn_interpolate(set, shape));
}
BENCHMARK(BM_NnInterpolate)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

static void BM_LevelAreaVolume(benchmark::State& state) {
    SynthSpec s;
    s.ncols = s.nrows = static_cast<std::size_t>(state.range(0));
    const auto dem = synth_dem(s);
    for (auto _ : state) benchmark::DoNotOptimize(level_area_volume(dem, 830.0));
}
BENCHMARK(BM_LevelAreaVolume)->Arg(100)->Arg(512);
BENCHMARK_MAIN();
