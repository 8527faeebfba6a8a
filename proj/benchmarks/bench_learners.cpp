// Fit costs at sweep scale: every hyperparameter trial pays one of these per
// fold, so they bound how large a search budget stays interactive.
#include <benchmark/benchmark.h>

#include <cstdint>
#include <utility>

#include "subsetforge/dataset.hpp"
#include "subsetforge/synthgen.hpp"
#include "subsetforge/tuning.hpp"

using namespace subsetforge;

namespace {

// 350 standardized training rows, 29 columns: the shape one cv fold sees.
const Dataset& train_split() {
  static const Dataset train = [] {
    GeneratorConfig config = default_generator_config(3);
    config.n_rows = 500;
    Dataset data = generate(config);
    SplitPair split = stratified_split(data, 0.3, derive_seed(3, "split"));
    StandardizeResult st = standardize(split.train, split.test);
    return std::move(st.train);
  }();
  return train;
}

void BM_fit(benchmark::State& state, LearnerKind kind) {
  const Dataset& train = train_split();
  HyperParams params = default_params(kind);
  std::uint64_t seed = 17;
  for (auto _ : state)
    benchmark::DoNotOptimize(fit(kind, params, train.features, train.target, seed));
}
BENCHMARK_CAPTURE(BM_fit, lr, LearnerKind::LR);
BENCHMARK_CAPTURE(BM_fit, svm, LearnerKind::SVM);
BENCHMARK_CAPTURE(BM_fit, rf, LearnerKind::RF);
BENCHMARK_CAPTURE(BM_fit, ann, LearnerKind::ANN);
BENCHMARK_CAPTURE(BM_fit, gbt, LearnerKind::GBT);

void BM_predict(benchmark::State& state, LearnerKind kind) {
  const Dataset& train = train_split();
  TrainedModel model = fit(kind, default_params(kind), train.features, train.target, 17);
  for (auto _ : state) benchmark::DoNotOptimize(predict_scores(model, train.features));
}
BENCHMARK_CAPTURE(BM_predict, rf, LearnerKind::RF);
BENCHMARK_CAPTURE(BM_predict, gbt, LearnerKind::GBT);

// One candidate-subset evaluation as selection performs it.
void BM_cv_auc_lr(benchmark::State& state) {
  const Dataset& train = train_split();
  FoldAssignment folds = stratified_kfold(train.target, 5, 23);
  HyperParams params = default_params(LearnerKind::LR);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        cv_auc(LearnerKind::LR, params, train.features, train.target, folds, 29));
}
BENCHMARK(BM_cv_auc_lr);

}  // namespace
