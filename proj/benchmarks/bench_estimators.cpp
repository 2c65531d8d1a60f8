#include <benchmark/benchmark.h>

#include "locest/estimators.hpp"
#include "locest/experiments.hpp"
#include "locest/fixtures.hpp"

namespace {

using namespace locest;

void BM_LocalMle(benchmark::State& state) {
  const Distribution d = Distribution::gaussian();
  auto m = smooth_cached(d, 0.5);
  RngStream gen = RngStream::derive(7, "bench");
  const std::vector<double> xs = d.sample(static_cast<std::size_t>(state.range(0)), gen);
  EstimatorConfig cfg;
  uint64_t t = 0;
  for (auto _ : state) {
    RngStream rng = RngStream::derive(7, "bench_trial", t++);
    benchmark::DoNotOptimize(local_mle(*m, xs, -2.0, 2.0, rng, cfg).lambda_hat);
  }
}
BENCHMARK(BM_LocalMle)->Arg(100)->Arg(1000);

void BM_GlobalMle(benchmark::State& state) {
  const Distribution d = Distribution::laplace(1.0);
  RngStream gen = RngStream::derive(11, "bench");
  const std::vector<double> xs = d.sample(1000, gen);
  EstimatorConfig cfg;
  uint64_t t = 0;
  for (auto _ : state) {
    RngStream rng = RngStream::derive(11, "bench_trial", t++);
    benchmark::DoNotOptimize(global_mle(d, xs, 0.05, rng, cfg).lambda_hat);
  }
}
BENCHMARK(BM_GlobalMle)->Unit(benchmark::kMillisecond);

void BM_HeatmapCell(benchmark::State& state) {
  FixtureSpec spec;
  spec.name = FixtureName::SpikedLaplace;
  ExperimentConfig cfg;
  cfg.dist = make_fixture(spec);
  cfg.n_grid = {static_cast<std::size_t>(state.range(0))};
  cfg.r_grid = {0.05};
  cfg.trials = 20;
  cfg.workers = 1;
  for (auto _ : state) benchmark::DoNotOptimize(run_mse_heatmap(cfg).front().mse);
}
BENCHMARK(BM_HeatmapCell)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
