#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include <mixsep/detect.hpp>
#include <mixsep/em.hpp>
#include <mixsep/msm.hpp>
#include <mixsep/nvm.hpp>
#include <mixsep/pipeline.hpp>
#include <mixsep/signal_gen.hpp>

namespace {

using namespace mixsep;

std::vector<double> noise_series(int n, double sigma, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, sigma);
    std::vector<double> out(n);
    for (double& v : out) v = dist(rng);
    return out;
}

SyntheticRecord bench_record() {
    const std::vector<EpochSpec> epochs(4, {600.0, 150.0, 1.0, 10.0, 0.0, 12.0});
    return generate_myogram(epochs, 1000.0, 97);
}

void bm_em_fit_window(benchmark::State& state) {
    const std::vector<double> sample = noise_series(50, 1.0, 11);
    for (auto _ : state) {
        benchmark::DoNotOptimize(em_fit(sample, 3));
    }
}
BENCHMARK(bm_em_fit_window);

void bm_msm_pass(benchmark::State& state) {
    const SyntheticRecord rec = bench_record();
    const std::vector<double> incr = increments(rec.samples);
    for (auto _ : state) {
        benchmark::DoNotOptimize(msm_pass(incr, 50, 3));
    }
}
BENCHMARK(bm_msm_pass)->Unit(benchmark::kMillisecond);

void bm_grid_pass(benchmark::State& state) {
    const SyntheticRecord rec = bench_record();
    PipelineConfig cfg;
    cfg.grid_locations = 20;
    const std::vector<double> dynamic = grid_analysis(rec.samples, cfg).dynamic;
    const Grid grid = build_grid(dynamic, cfg);
    for (auto _ : state) {
        benchmark::DoNotOptimize(grid_msm_pass(dynamic, grid, cfg.grid_window, cfg.grid_shift));
    }
}
BENCHMARK(bm_grid_pass)->Unit(benchmark::kMillisecond);

void bm_chi_square_pvalue(benchmark::State& state) {
    const NormalMixture m({0.6, 0.4}, {-1.0, 2.0}, {1.0, 0.5});
    const std::vector<double> sample = m.sample(100, 21);
    for (auto _ : state) {
        benchmark::DoNotOptimize(chi_square_pvalue(sample, m, 5));
    }
}
BENCHMARK(bm_chi_square_pvalue);

void bm_nvm_pdf(benchmark::State& state) {
    const NvmParams params{0.5, 1.0, GenGammaParams{1.0, 1.5, 1.0}};
    double x = -3.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(nvm_pdf(params, x));
        x = x < 3.0 ? x + 0.1 : -3.0;
    }
}
BENCHMARK(bm_nvm_pdf);

void bm_fit_nvm(benchmark::State& state) {
    const std::vector<double> sample = noise_series(100, 1.0, 31);
    NvmFitConfig cfg;
    cfg.max_evaluations = 400;
    for (auto _ : state) {
        benchmark::DoNotOptimize(fit_nvm(sample, MixingFamily::GeneralizedGamma, std::nullopt, cfg));
    }
}
BENCHMARK(bm_fit_nvm)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
