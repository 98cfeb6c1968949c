#include <benchmark/benchmark.h>

#include <advscore/fit.hpp>
#include <advscore/irt.hpp>
#include <advscore/score.hpp>
#include <advscore/synth.hpp>

using namespace advscore;

namespace {

void BM_Sigmoid(benchmark::State& state) {
  double x = -20.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(static_cast<double>(sigmoid(x)));
    x += 0.001;
    if (x > 20.0) x = -20.0;
  }
}
BENCHMARK(BM_Sigmoid);

void BM_PCorrect(benchmark::State& state) {
  const ItemParams item{0.3, 1.7};
  double skill = -3.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(static_cast<double>(p_correct(skill, item)));
    skill += 0.001;
    if (skill > 3.0) skill = -3.0;
  }
}
BENCHMARK(BM_PCorrect);

void BM_Tif(benchmark::State& state) {
  const ItemParams item{0.0, static_cast<double>(state.range(0)) / 10.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(tif(item));
  }
}
BENCHMARK(BM_Tif)->Arg(1)->Arg(10)->Arg(50);

const SynthTruth& gradient_fixture() {
  static const SynthTruth truth = [] {
    SynthConfig config;
    config.n_humans = 60;
    config.n_models = 40;
    config.n_items = 100;
    config.seed = 1;
    return generate(config);
  }();
  return truth;
}

void BM_Gradient(benchmark::State& state) {
  const SynthTruth& truth = gradient_fixture();
  IrtParameters params;
  params.skills = truth.true_skills;
  params.difficulties = truth.true_difficulties;
  params.discriminations = truth.true_discriminations;
  FitConfig config;
  for (auto _ : state) {
    benchmark::DoNotOptimize(gradient(params, truth.matrix, config));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(truth.matrix.records.size()));
}
BENCHMARK(BM_Gradient);

void BM_Fit(benchmark::State& state) {
  SynthConfig config;
  config.n_humans = 30;
  config.n_models = 20;
  config.n_items = 30;
  config.seed = 2;
  const SynthTruth truth = generate(config);
  FitConfig fit_config;
  fit_config.max_epochs = static_cast<int>(state.range(0));
  fit_config.patience = fit_config.max_epochs;  // benchmark a fixed epoch budget
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit(truth.matrix, fit_config));
  }
}
BENCHMARK(BM_Fit)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_ScoreDataset(benchmark::State& state) {
  SynthConfig config;
  config.n_humans = 40;
  config.n_models = 20;
  config.n_items = 60;
  config.seed = 3;
  const SynthTruth truth = generate(config);
  FitConfig fit_config;
  fit_config.max_epochs = 150;
  const IrtParameters params = fit(truth.matrix, fit_config);
  for (auto _ : state) {
    benchmark::DoNotOptimize(score_dataset(truth.matrix, params));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(truth.matrix.items.size()));
}
BENCHMARK(BM_ScoreDataset)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
