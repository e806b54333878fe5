#include <benchmark/benchmark.h>

#include "kdvlab/bnf.hpp"
#include "kdvlab/hill.hpp"
#include "kdvlab/invariants.hpp"
#include "kdvlab/pde.hpp"

using namespace kdvlab;

namespace {

const Potential& sample() {
    static const auto q = families::cosine_modes({{1, 0.1}, {2, 0.02}, {3, 0.005}});
    return q;
}

void BM_Discriminant(benchmark::State& st) {
    const double lambda = 9.87;
    for (auto _ : st) benchmark::DoNotOptimize(discriminant(sample(), lambda));
}
BENCHMARK(BM_Discriminant);

void BM_PeriodicSpectrum(benchmark::State& st) {
    const int N = static_cast<int>(st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(periodic_spectrum(sample(), N));
}
BENCHMARK(BM_PeriodicSpectrum)->Arg(4)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_Analyze(benchmark::State& st) {
    const int N = static_cast<int>(st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(analyze(sample(), N));
}
BENCHMARK(BM_Analyze)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_EvolveSteps(benchmark::State& st) {
    EvolveOptions opt;
    opt.eq = st.range(0) == 0 ? Equation::kdv : Equation::kdv2;
    opt.M = static_cast<int>(st.range(1));
    opt.stride = 1 << 30;
    const double dt = default_dt(opt.eq, opt.M);
    opt.dt = dt;
    for (auto _ : st) benchmark::DoNotOptimize(evolve(sample(), 100 * dt, opt));
    st.SetItemsProcessed(100 * st.iterations());
}
BENCHMARK(BM_EvolveSteps)->Args({0, 128})->Args({0, 256})->Args({1, 128})->Unit(benchmark::kMillisecond);

void BM_ResonanceScan(benchmark::State& st) {
    ResonanceScanOptions opt;
    opt.Kmax = static_cast<int>(st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(resonance_scan({1, 2}, 0.0, opt));
}
BENCHMARK(BM_ResonanceScan)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
