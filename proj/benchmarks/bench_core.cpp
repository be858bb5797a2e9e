#include <benchmark/benchmark.h>

#include "dip/dip.hpp"
#include "dip/learners.hpp"
#include "dip/synthetic.hpp"

namespace {

dip::LearnerConfig bench_config() {
  dip::LearnerConfig config;
  config.rounds = 100;
  return config;
}

void BM_FitBoosted(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const dip::Dataset data = dip::synthetic::gen_quadratic_trio(3, n, 11);
  const std::vector<std::size_t> scope{0, 1};
  const dip::LearnerConfig config = bench_config();
  for (auto _ : state) {
    auto fit = dip::fit_boosted(data, scope, config);
    benchmark::DoNotOptimize(fit.model);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_FitBoosted)->Arg(5000)->Arg(20000)->Unit(benchmark::kMillisecond);

void BM_FitGgam(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const dip::Dataset data = dip::synthetic::gen_quadratic_trio(3, n, 11);
  const dip::GroupSpec group{{0}, {1}};
  const dip::LearnerConfig config = bench_config();
  for (auto _ : state) {
    auto fit = dip::fit_ggam(data, group, config);
    benchmark::DoNotOptimize(fit.model);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_FitGgam)->Arg(5000)->Arg(20000)->Unit(benchmark::kMillisecond);

void BM_Decompose(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const dip::Dataset data = dip::synthetic::gen_quadratic_trio(2, n, 17);
  const dip::SplitPlan split = dip::holdout_split(n, 0.2, 3);
  const dip::GroupSpec group{{0}, {1}};
  const dip::LearnerConfig config = bench_config();
  for (auto _ : state) {
    auto result = dip::decompose(data, split, group, config);
    benchmark::DoNotOptimize(result);
  }
}
BENCHMARK(BM_Decompose)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
