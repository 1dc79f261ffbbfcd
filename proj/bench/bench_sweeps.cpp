#include <benchmark/benchmark.h>

#include <cmath>

#include "apm/bif.hpp"
#include "apm/rescale.hpp"
#include "apm/semilocal.hpp"

using namespace apm;

namespace {

ModelMap reference(double x_plus) {
    ExactGlobalMap g;
    g.x_plus = x_plus;
    g.y_minus = 1.0;
    g.b = -1.0;
    g.c = 1.0;
    g.d = 1.0;
    g.sigma = 1.0;
    g.f03 = 0.2;
    return ModelMap(SaddleNormalForm(0.5, {}), g);
}

Exec mode(const benchmark::State& s) { return s.range(0) == 0 ? Exec::Serial : Exec::Parallel; }

void BM_RescaleSweep(benchmark::State& state) {
    const ModelMap m = reference(1.0);
    for (auto _ : state) benchmark::DoNotOptimize(rescale_sweep(m, 6, 14, 2.0, mode(state)));
}

void BM_CascadeScan(benchmark::State& state) {
    const ModelMap m = reference(1.2);
    for (auto _ : state) benchmark::DoNotOptimize(cascade_scan(m, 6, 14, mode(state)));
}

void BM_GlobalResonance(benchmark::State& state) {
    const ModelMap m = reference(1.0);
    for (auto _ : state) benchmark::DoNotOptimize(global_resonance_check(m, 8, 16, mode(state)));
}

void BM_CalibrateS1(benchmark::State& state) {
    ExactGlobalMap g{std::pow(0.5, 0.5), 1.0, 0.0, -1.0, 1.0, 1.0, 0.0, 0.0};
    const ModelMap m(SaddleNormalForm(0.5, {}), g, 1, Chart{0.05, 0.05});
    const int kb = default_k_bar(m);
    for (auto _ : state) benchmark::DoNotOptimize(calibrate_S1(m, kb, 8, mode(state)));
}

}  // namespace

// Argument 0 is the serial reference, 1 the OpenMP version.
BENCHMARK(BM_RescaleSweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CascadeScan)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GlobalResonance)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CalibrateS1)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
