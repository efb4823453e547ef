// Parallel kernels against their serial references.

#include <benchmark/benchmark.h>
#include <omp.h>

#include "lerw/harmonic.hpp"
#include "lerw/walk.hpp"

using namespace lerw;

namespace {

GridPtr disk(double R, double h) {
    Domain d;
    d.far_radius = R;
    return build_grid(d, Target::interior({0.0, 0.5}), h);
}

void BM_GreenSolve(benchmark::State& st, bool reference) {
    auto g = disk(2.0, 1.0 / static_cast<double>(st.range(0)));
    SolveOptions opt;
    opt.reference = reference;
    for (auto _ : st) benchmark::DoNotOptimize(green_function(g, nullptr, {0.0, 0.5}, opt).values.data());
    st.counters["sites"] = static_cast<double>(g->num_sites());
}
BENCHMARK_CAPTURE(BM_GreenSolve, mg_pcg, false)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_GreenSolve, serial_sor, true)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

// Replica batch on all threads vs one thread; the samples are identical.
void BM_SampleBatch(benchmark::State& st) {
    LerwSampler s(disk(3.0, 1.0 / 32));
    const int threads = static_cast<int>(st.range(0));
    const int saved = omp_get_max_threads();
    omp_set_num_threads(threads > 0 ? threads : saved);
    for (auto _ : st) benchmark::DoNotOptimize(s.sample_batch(1, 0, 256).data());
    omp_set_num_threads(saved);
    st.counters["threads"] = threads > 0 ? threads : saved;
}
BENCHMARK(BM_SampleBatch)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
