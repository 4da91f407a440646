#include <benchmark/benchmark.h>

#include "landmark2vec/embedder.hpp"
#include "landmark2vec/evaluation.hpp"
#include "landmark2vec/measurement.hpp"
#include "landmark2vec/simgen.hpp"

using namespace landmark2vec;

namespace {

LandmarkMap circle(std::size_t L) {
  Layout layout;
  layout.landmark_count = L;
  return make_layout(layout);
}

std::vector<TrainingPair> pairs_for(std::size_t L, std::size_t count) {
  const auto map = circle(L);
  const auto set = gen_pathloss(map, count, enclosing_region(map), PathlossParams{}, 5);
  return build_dataset(set, std::min<std::size_t>(10, L)).pairs;
}

void BM_ForwardBackward(benchmark::State& state) {
  const auto L = static_cast<std::size_t>(state.range(0));
  const auto model = init_model(L, 2, 1);
  const auto pairs = pairs_for(L, 64);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(backward(model, pairs[i++ % pairs.size()]));
  }
}
BENCHMARK(BM_ForwardBackward)->Arg(30)->Arg(100)->Arg(300);

void BM_TrainEpoch(benchmark::State& state) {
  const auto pairs = pairs_for(30, static_cast<std::size_t>(state.range(0)));
  const auto cut = pairs.size() * 4 / 5;
  const std::vector<TrainingPair> train_set(pairs.begin(), pairs.begin() + static_cast<std::ptrdiff_t>(cut));
  const std::vector<TrainingPair> val_set(pairs.begin() + static_cast<std::ptrdiff_t>(cut), pairs.end());
  TrainConfig config;
  config.max_epochs = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(train(train_set, val_set, config));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(pairs.size()));
}
BENCHMARK(BM_TrainEpoch)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_FitAffine(benchmark::State& state) {
  const auto truth = circle(static_cast<std::size_t>(state.range(0)));
  Eigen::MatrixXd est = truth.coords() * 0.7;
  est.col(0).array() += 0.1 * est.col(1).array().square();
  const LandmarkMap est_map(est);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_affine(truth, est_map));
  }
}
BENCHMARK(BM_FitAffine)->Arg(30)->Arg(1000);

void BM_GenPathloss(benchmark::State& state) {
  const auto map = circle(30);
  const auto region = enclosing_region(map);
  for (auto _ : state) {
    benchmark::DoNotOptimize(gen_pathloss(map, static_cast<std::size_t>(state.range(0)), region, PathlossParams{}, 3));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GenPathloss)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
