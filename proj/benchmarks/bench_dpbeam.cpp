// Microbenchmarks for the simulation hot paths: steering vectors, dictionary
// construction, hybrid decomposition, pattern evaluation, channel sampling,
// beam alignment, and a full Monte-Carlo trial.

#include <benchmark/benchmark.h>

#include <numbers>

#include "dpbeam/channel.hpp"
#include "dpbeam/codebook.hpp"
#include "dpbeam/hybrid.hpp"
#include "dpbeam/protocol.hpp"
#include "dpbeam/rng.hpp"
#include "dpbeam/sim.hpp"

namespace {

using namespace dpbeam;

void bm_steering_paired(benchmark::State& state) {
    const ArrayGeometry geom(8, 8);
    double az = 0.3, el = -0.2;
    for (auto _ : state) {
        benchmark::DoNotOptimize(steering_paired(az, el, geom));
        az = -az;
        el = -el;
    }
}
BENCHMARK(bm_steering_paired);

void bm_build_dictionaries(benchmark::State& state) {
    const ArrayGeometry geom(8, 8);
    const RegionPartition part(6, 6, 7, 7);
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_dictionaries(geom, part));
    }
}
BENCHMARK(bm_build_dictionaries);

void bm_omp_decompose(benchmark::State& state) {
    Rng rng = make_rng(1);
    Vec target(128);
    for (int i = 0; i < target.size(); ++i) target[i] = complex_normal(rng);
    target /= target.norm();
    const int n_rf = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(omp_decompose(target, n_rf, 4));
    }
}
BENCHMARK(bm_omp_decompose)->Arg(1)->Arg(4);

void bm_pattern_grid(benchmark::State& state) {
    const ArrayGeometry geom(8, 8);
    Rng rng = make_rng(2);
    Vec fold(geom.panel_size());
    for (int i = 0; i < fold.size(); ++i) fold[i] = complex_normal(rng);
    fold /= fold.norm();
    const int n = static_cast<int>(state.range(0));
    RVec psi(n);
    for (int k = 0; k < n; ++k) {
        psi[k] = -std::numbers::pi + 2.0 * std::numbers::pi * k / n;
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(steering_response_grid(fold, geom, psi, psi));
    }
}
BENCHMARK(bm_pattern_grid)->Arg(64)->Arg(512);

void bm_sample_channel(benchmark::State& state) {
    const ChannelConfig cfg;
    const ArrayGeometry geom(8, 8);
    uint64_t seed = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(sample_channel(cfg, geom, geom, seed++));
    }
}
BENCHMARK(bm_sample_channel);

void bm_beam_align(benchmark::State& state) {
    ExperimentConfig cfg;
    const DesignArtifacts art = design_codebooks(cfg);
    const ChannelRealization ch =
        sample_channel(cfg.channel, art.tx_geom, art.rx_geom, 42);
    for (auto _ : state) {
        benchmark::DoNotOptimize(beam_align(ch, art.tx_align, art.rx_align, 1.0, 7));
    }
}
BENCHMARK(bm_beam_align);

void bm_trial(benchmark::State& state) {
    ExperimentConfig cfg;
    const DesignArtifacts art = design_codebooks(cfg);
    uint64_t seed = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(data_rate_trial(art, cfg, 1.0, seed++));
    }
}
BENCHMARK(bm_trial);

}  // namespace

BENCHMARK_MAIN();
