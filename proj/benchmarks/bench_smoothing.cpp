#include <benchmark/benchmark.h>

#include "locest/fixtures.hpp"
#include "locest/smoothing.hpp"

namespace {

using namespace locest;

void BM_FisherClosedForm(benchmark::State& state) {
  const Distribution d = Distribution::gaussian();
  const double r = 0.1 * static_cast<double>(state.range(0));
  for (auto _ : state) {
    SmoothedModel m(d, r);
    benchmark::DoNotOptimize(m.fisher_info());
  }
}
BENCHMARK(BM_FisherClosedForm)->Arg(1)->Arg(10);

void BM_GridModelBuild(benchmark::State& state) {
  FixtureSpec spec;
  spec.name = FixtureName::SpikedLaplace;
  const Distribution d = make_fixture(spec);
  const double r = 1.0 / static_cast<double>(state.range(0));
  for (auto _ : state) {
    SmoothedModel m(d, r);
    benchmark::DoNotOptimize(m.log_pdf(0.0));
  }
}
BENCHMARK(BM_GridModelBuild)->Arg(2)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_ScoreEvalGrid(benchmark::State& state) {
  FixtureSpec spec;
  spec.name = FixtureName::SpikedLaplace;
  const SmoothedModel m(make_fixture(spec), 0.05);
  double x = -3.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(m.score(x));
    x = x < 3.0 ? x + 1e-4 : -3.0;
  }
}
BENCHMARK(BM_ScoreEvalGrid);

void BM_FisherGrid(benchmark::State& state) {
  const Distribution d = Distribution::laplace(1.0);
  for (auto _ : state) {
    SmoothedModel m(d, 0.1);
    benchmark::DoNotOptimize(m.fisher_info());
  }
}
BENCHMARK(BM_FisherGrid)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
