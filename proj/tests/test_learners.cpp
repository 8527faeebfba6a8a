#include <cmath>
#include <vector>

#include "doctest.h"
#include "subsetforge/learners.hpp"

using namespace subsetforge;

namespace {

struct Fixture {
  Matrix x;
  std::vector<int> y;
};

// Two interleaved classes separated along the first feature.
Fixture linear_blob(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Fixture f;
  f.x = Matrix(n, 2);
  f.y.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    int cls = static_cast<int>(i % 2);
    f.x.at(i, 0) = (cls ? 2.0 : -2.0) + 0.5 * rng.normal();
    f.x.at(i, 1) = rng.normal();
    f.y[i] = cls;
  }
  return f;
}

// Jittered XOR: not linearly separable.
Fixture xor_cloud(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Fixture f;
  f.x = Matrix(n, 2);
  f.y.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double a = static_cast<double>(i % 2);
    double b = static_cast<double>((i / 2) % 2);
    f.x.at(i, 0) = a + 0.1 * rng.normal();
    f.x.at(i, 1) = b + 0.1 * rng.normal();
    f.y[i] = (a != b) ? 1 : 0;
  }
  return f;
}

double train_accuracy(const TrainedModel& model, const Fixture& f) {
  std::vector<int> got = predict_labels(model, f.x);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < f.y.size(); ++i) hits += (got[i] == f.y[i]);
  return static_cast<double>(hits) / static_cast<double>(f.y.size());
}

}  // namespace

TEST_CASE("kind names round trip") {
  CHECK(all_learner_kinds().size() == kLearnerKindCount);
  for (LearnerKind kind : all_learner_kinds()) {
    CHECK(kind_from_name(kind_name(kind)) == kind);
    CHECK(kind_from_name(kind_display_name(kind)) == kind);
  }
  CHECK(kind_display_name(LearnerKind::GBT) == "XGBoost");
  CHECK(kind_name(LearnerKind::GBT) == "GBT");

  const std::vector<LearnerKind>& bases = base_learner_kinds();
  CHECK(bases.size() == 5);
  for (LearnerKind kind : bases) CHECK(kind != LearnerKind::SBEL);

  CHECK_THROWS_AS(kind_from_name("perceptron"), InvalidArgument);
}

TEST_CASE("hyperparameter plumbing") {
  HyperParams p;
  p.set("lr.C", 2.0);
  p.set("lr.max_iter", 50);
  p.set("gbt.rounds", 10);

  CHECK(p.get("lr.C") == 2.0);
  CHECK_THROWS_AS(p.get("absent"), InvalidArgument);
  CHECK(p.get_or("absent", 7.0) == 7.0);
  CHECK(p.has("gbt.rounds"));

  HyperParams lr = p.with_prefix_stripped("lr.");
  CHECK(lr.values().size() == 2);
  CHECK(lr.get("C") == 2.0);
  CHECK(lr.get("max_iter") == 50);
  CHECK_FALSE(lr.has("rounds"));
}

TEST_CASE("default parameters validate for every kind") {
  for (LearnerKind kind : all_learner_kinds())
    CHECK_NOTHROW(validate_params(kind, default_params(kind)));
}

TEST_CASE("parameter validation rejects bad settings") {
  HyperParams p = default_params(LearnerKind::LR);
  p.set("banana", 1.0);
  CHECK_THROWS_AS(validate_params(LearnerKind::LR, p), InvalidArgument);

  p = default_params(LearnerKind::LR);
  p.set("C", -1.0);
  CHECK_THROWS_AS(validate_params(LearnerKind::LR, p), InvalidArgument);

  p = default_params(LearnerKind::RF);
  p.set("trees", 2.5);  // integer-valued knob
  CHECK_THROWS_AS(validate_params(LearnerKind::RF, p), InvalidArgument);

  p = default_params(LearnerKind::ANN);
  p.set("learning_rate", std::nan(""));
  CHECK_THROWS_AS(validate_params(LearnerKind::ANN, p), InvalidArgument);

  // Nested stacking keys resolve against the base learner's bounds.
  p = HyperParams();
  p.set("lr.C", 0.5);
  CHECK_NOTHROW(validate_params(LearnerKind::SBEL, p));
  p.set("lr.banana", 1.0);
  CHECK_THROWS_AS(validate_params(LearnerKind::SBEL, p), InvalidArgument);
  p = HyperParams();
  p.set("rf.trees", 0);
  CHECK_THROWS_AS(validate_params(LearnerKind::SBEL, p), InvalidArgument);
}

TEST_CASE("every learner separates a linear blob") {
  Fixture f = linear_blob(80, 17);
  for (LearnerKind kind : all_learner_kinds()) {
    HyperParams params = default_params(kind);
    if (kind == LearnerKind::SBEL) params.set("folds", 3);
    TrainedModel model = fit(kind, params, f.x, f.y, 1);
    CHECK(model.kind == kind);
    CHECK(model.feature_names == std::vector<std::string>{"f0", "f1"});

    std::vector<double> scores = predict_scores(model, f.x);
    REQUIRE(scores.size() == f.y.size());
    if (kind != LearnerKind::SVM)
      for (double s : scores) {
        CHECK(s >= 0.0);
        CHECK(s <= 1.0);
      }

    INFO(kind_name(kind));
    CHECK(train_accuracy(model, f) >= 0.95);
  }
}

TEST_CASE("default thresholds match the score semantics") {
  for (LearnerKind kind : all_learner_kinds())
    CHECK(default_threshold(kind) == (kind == LearnerKind::SVM ? 0.0 : 0.5));
}

TEST_CASE("neural net learns xor") {
  Fixture f = xor_cloud(200, 3);
  HyperParams params = default_params(LearnerKind::ANN);
  params.set("hidden", 8);
  params.set("epochs", 400);
  params.set("learning_rate", 0.1);
  TrainedModel model = fit(LearnerKind::ANN, params, f.x, f.y, 4);
  CHECK(train_accuracy(model, f) >= 0.95);

  // A linear model cannot get much past chance on the same cloud.
  TrainedModel line = fit(LearnerKind::LR, default_params(LearnerKind::LR), f.x, f.y, 4);
  CHECK(train_accuracy(line, f) <= 0.7);
}

TEST_CASE("boosted trees keep a per-round audit trail") {
  Fixture f = linear_blob(120, 9);
  HyperParams params = default_params(LearnerKind::GBT);
  params.set("rounds", 40);
  TrainedModel model = fit(LearnerKind::GBT, params, f.x, f.y, 2);

  REQUIRE(model.boosted);
  CHECK(model.boosted->trees.size() == 40);
  REQUIRE(model.boosted->train_loss.size() == 40);
  CHECK(model.boosted->train_loss.back() < model.boosted->train_loss.front());
  for (std::size_t i = 1; i < 40; ++i)
    CHECK(model.boosted->train_loss[i] <= model.boosted->train_loss[i - 1] + 1e-9);
}

TEST_CASE("random forest is seed-deterministic") {
  Fixture f = linear_blob(100, 21);
  HyperParams params = default_params(LearnerKind::RF);
  params.set("trees", 30);

  TrainedModel a = fit(LearnerKind::RF, params, f.x, f.y, 5);
  TrainedModel b = fit(LearnerKind::RF, params, f.x, f.y, 5);
  TrainedModel c = fit(LearnerKind::RF, params, f.x, f.y, 6);
  REQUIRE(a.forest);
  CHECK(a.forest->trees.size() == 30);
  CHECK(predict_scores(a, f.x) == predict_scores(b, f.x));
  CHECK(predict_scores(a, f.x) != predict_scores(c, f.x));
  CHECK(a.train_seed == 5);
}

TEST_CASE("training inputs are validated") {
  Fixture f = linear_blob(20, 1);
  HyperParams params = default_params(LearnerKind::LR);

  std::vector<int> ones(20, 1);
  CHECK_THROWS_AS(fit(LearnerKind::LR, params, f.x, ones, 1), InvalidArgument);

  std::vector<int> short_y(19, 0);
  CHECK_THROWS_AS(fit(LearnerKind::LR, params, f.x, short_y, 1), InvalidArgument);

  std::vector<int> bad_label = f.y;
  bad_label[3] = 2;
  CHECK_THROWS_AS(fit(LearnerKind::LR, params, f.x, bad_label, 1), InvalidArgument);

  Matrix bad_x = f.x;
  bad_x.at(0, 1) = std::nan("");
  CHECK_THROWS_AS(fit(LearnerKind::LR, params, bad_x, f.y, 1), InvalidArgument);

  CHECK_THROWS_AS(fit(LearnerKind::LR, params, f.x, f.y, 1, {"just one name"}),
                  InvalidArgument);

  TrainedModel model = fit(LearnerKind::LR, params, f.x, f.y, 1);
  Matrix wide(4, 3);
  CHECK_THROWS_AS(predict_scores(model, wide), InvalidArgument);
}

TEST_CASE("models survive json round trips") {
  Fixture f = linear_blob(60, 33);
  Matrix probe = linear_blob(15, 34).x;

  HyperParams rf_params = default_params(LearnerKind::RF);
  rf_params.set("trees", 20);
  TrainedModel rf = fit(LearnerKind::RF, rf_params, f.x, f.y, 7, {"alpha", "beta"});
  TrainedModel rf_back = trained_model_from_json(to_json(rf));
  CHECK(rf_back.kind == LearnerKind::RF);
  CHECK(rf_back.params == rf.params);
  CHECK(rf_back.feature_names == rf.feature_names);
  CHECK(predict_scores(rf_back, probe) == predict_scores(rf, probe));

  HyperParams sbel_params = default_params(LearnerKind::SBEL);
  sbel_params.set("folds", 3);
  TrainedModel sbel = fit(LearnerKind::SBEL, sbel_params, f.x, f.y, 8);
  TrainedModel sbel_back = trained_model_from_json(to_json(sbel));
  CHECK(sbel_back.kind == LearnerKind::SBEL);
  CHECK(predict_scores(sbel_back, probe) == predict_scores(sbel, probe));

  CHECK_THROWS_AS(trained_model_from_json("wat"), ParseError);
  CHECK_THROWS_AS(trained_model_from_json("{\"format_version\": 99}"), ParseError);
}

TEST_CASE("stacking calibrates probabilities and audits itself") {
  Fixture f = linear_blob(90, 41);
  std::map<LearnerKind, HyperParams> base_params;
  for (LearnerKind base : base_learner_kinds()) {
    HyperParams p = default_params(base);
    if (base == LearnerKind::RF) p.set("trees", 25);
    if (base == LearnerKind::ANN) p.set("epochs", 60);
    if (base == LearnerKind::GBT) p.set("rounds", 40);
    base_params[base] = p;
  }
  HyperParams meta;
  meta.set("C", 1.0);

  TrainedModel model = fit_stacked(base_params, meta, f.x, f.y, 3, 2);
  CHECK(model.kind == LearnerKind::SBEL);
  REQUIRE(model.stacked);
  CHECK(model.stacked->bases.size() == 5);
  CHECK(model.stacked->audit.passed);
  CHECK(model.stacked->audit.rows_checked == f.y.size());
  CHECK(model.stacked->svm_lo < model.stacked->svm_hi);

  for (double s : predict_scores(model, f.x)) {
    CHECK(s >= 0.0);
    CHECK(s <= 1.0);
  }
  CHECK(train_accuracy(model, f) >= 0.95);

  // The refit bases carry the supplied per-kind settings.
  for (const TrainedModel& base : model.stacked->bases)
    CHECK(base.params == base_params.at(base.kind));
}
