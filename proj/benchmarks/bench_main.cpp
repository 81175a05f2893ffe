#include <benchmark/benchmark.h>

#include "slm/analytic.hpp"
#include "slm/experiments.hpp"
#include "slm/measure.hpp"

namespace {

using slm::ParameterDistribution;
namespace ms = slm::measure;

// Particle-generations per second for the Monte-Carlo transfer operator.
void BM_advance(benchmark::State& state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto dist = ParameterDistribution::uniform(3.208, 0.024);
    auto e = ms::uniform_ensemble(n, 1);
    for (auto _ : state) {
        ms::advance(e, dist, 100);
        benchmark::DoNotOptimize(e.particles.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n) * 100);
}
BENCHMARK(BM_advance)->Arg(2000)->Arg(20000);

void BM_pf_step(benchmark::State& state)
{
    const auto dist = ParameterDistribution::uniform(3.208, 0.024);
    const auto e = ms::uniform_ensemble(20000, 1);
    for (auto _ : state)
        benchmark::DoNotOptimize(ms::pf_step(e, dist));
    state.SetItemsProcessed(state.iterations() * 20000);
}
BENCHMARK(BM_pf_step);

void BM_run_pooled_desk(benchmark::State& state)
{
    const auto dist = ParameterDistribution::uniform(3.208, 0.024);
    for (auto _ : state)
        benchmark::DoNotOptimize(ms::run_pooled(dist, ms::desk_scale(), 1).stats.mean());
}
BENCHMARK(BM_run_pooled_desk)->Unit(benchmark::kMillisecond);

void BM_periodic_orbit(benchmark::State& state)
{
    for (auto _ : state)
        benchmark::DoNotOptimize(slm::analytic::periodic_orbit(3.508, 4));
}
BENCHMARK(BM_periodic_orbit)->Unit(benchmark::kMicrosecond);

void BM_h_function_roots(benchmark::State& state)
{
    for (auto _ : state)
        benchmark::DoNotOptimize(slm::analytic::h_function_roots(3.208, slm::experiments::kLemmaEpsilon));
}
BENCHMARK(BM_h_function_roots)->Unit(benchmark::kMicrosecond);

}  // namespace

// The packaged benchmark_main archive carries LTO bytecode from another gcc.
BENCHMARK_MAIN();
