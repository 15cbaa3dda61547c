#include <benchmark/benchmark.h>

#include "biascrowd/dawid_skene.h"
#include "biascrowd/glad.h"
#include "biascrowd/majority.h"
#include "biascrowd/propensity.h"
#include "biascrowd/simulate.h"

namespace {

using namespace biascrowd;

// About ten labels per task on a workers x tasks grid.
SyntheticData make_data(int workers, int tasks) {
  SynthConfig cfg;
  cfg.n_workers = workers;
  cfg.n_tasks = tasks;
  cfg.mean_e = 10.0 / workers;
  cfg.sd_e = cfg.mean_e / 2;
  cfg.rho = -0.5;
  cfg.seed = 7;
  return generate_synthetic(cfg);
}

void BM_IpsMajorityVote(benchmark::State& state) {
  const auto data = make_data(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(ips_majority_vote(data.dataset, data.propensity));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(data.dataset.n_labels()));
}
BENCHMARK(BM_IpsMajorityVote)->Args({76, 462})->Args({164, 800});

void BM_DawidSkene(benchmark::State& state) {
  const auto data = make_data(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(ds_run(data.dataset, &data.propensity));
}
BENCHMARK(BM_DawidSkene)->Args({76, 462})->Args({164, 800})->Unit(benchmark::kMillisecond);

void BM_Glad(benchmark::State& state) {
  const auto data = make_data(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(glad_run(data.dataset, &data.propensity));
}
BENCHMARK(BM_Glad)->Args({76, 462})->Args({164, 800})->Unit(benchmark::kMillisecond);

void BM_NuclearBallProject(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int m = static_cast<int>(state.range(1));
  const Eigen::MatrixXd a = Eigen::MatrixXd::Random(n, m) * 3.0;
  const double radius = std::sqrt(static_cast<double>(n) * m);
  for (auto _ : state) benchmark::DoNotOptimize(nuclear_ball_project(a, radius));
}
BENCHMARK(BM_NuclearBallProject)->Args({76, 462})->Args({164, 800})->Unit(benchmark::kMillisecond);

void BM_OneBitCompletion(benchmark::State& state) {
  const auto data = make_data(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  const Eigen::MatrixXd observed = data.dataset.observation_matrix();
  MCConfig cfg;
  cfg.gamma = static_cast<double>(state.range(2)) / 10.0;
  for (auto _ : state) benchmark::DoNotOptimize(fit_1bit_mc(observed, cfg));
}
BENCHMARK(BM_OneBitCompletion)
    ->Args({76, 462, 1})
    ->Args({76, 462, 10})
    ->Args({76, 462, 100})
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
