#include <benchmark/benchmark.h>

#include "oamem/eit.hpp"
#include "oamem/modes.hpp"
#include "oamem/photon_stats.hpp"
#include "oamem/scenario.hpp"
#include "oamem/tomography.hpp"

using namespace oamem;

static void BM_SimulateStorage(benchmark::State& state) {
    StorageScenario s = StorageScenario::calibrated();
    s.grid.nz = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(run_scenario(s).se);
    state.counters["nz"] = static_cast<double>(s.grid.nz);
}
BENCHMARK(BM_SimulateStorage)->Arg(200)->Arg(400)->Arg(800)->Unit(benchmark::kMillisecond);

static void BM_EffectiveOd(benchmark::State& state) {
    const EnsembleConfig ens = StorageScenario::calibrated().ensemble;
    const LGMode mode{static_cast<int>(state.range(0)), 100.0};
    for (auto _ : state) benchmark::DoNotOptimize(effective_od(mode, ens));
}
BENCHMARK(BM_EffectiveOd)->Arg(0)->Arg(5);

static void BM_Threshold(benchmark::State& state) {
    for (auto _ : state) {
        for (double nbar : {0.1, 0.5, 1.0, 2.0}) benchmark::DoNotOptimize(coherent_fidelity_threshold(nbar));
    }
}
BENCHMARK(BM_Threshold);

static TomographyRecord sample_record() {
    return simulate_tomography(DensityMatrix2::from_ket(basis_state(Basis::H)), {0.5, 2.5e5}, {}, 1200, 1, 0.65);
}

static void BM_Reconstruct(benchmark::State& state) {
    const TomographyRecord rec = sample_record();
    for (auto _ : state) benchmark::DoNotOptimize(reconstruct(rec).stokes.s1);
}
BENCHMARK(BM_Reconstruct);

static void BM_BootstrapFidelity(benchmark::State& state) {
    const TomographyRecord rec = sample_record();
    const auto rho = DensityMatrix2::from_ket(basis_state(Basis::H));
    for (auto _ : state) benchmark::DoNotOptimize(fidelity_with_error(rec, rho, 1000, 7).sigma);
}
BENCHMARK(BM_BootstrapFidelity)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
