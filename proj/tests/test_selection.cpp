#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "doctest.h"
#include "subsetforge/selection.hpp"
#include "subsetforge/tuning.hpp"

using namespace subsetforge;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

FeatureSchema schema_of(const std::vector<std::string>& names) {
  FeatureSchema s;
  for (const std::string& n : names) s.columns.push_back({n, ColumnKind::Continuous, -kInf, kInf});
  s.target = {"y", ColumnKind::Binary, 0.0, 1.0};
  return s;
}

Dataset columns_dataset(const FeatureSchema& schema,
                        const std::vector<std::vector<double>>& cols,
                        const std::vector<int>& target) {
  Dataset d;
  d.features = Matrix(target.size(), cols.size());
  for (std::size_t c = 0; c < cols.size(); ++c)
    for (std::size_t r = 0; r < target.size(); ++r) d.features.at(r, c) = cols[c][r];
  d.target = target;
  d.schema = schema;
  return d;
}

// alpha: strong signal; alpha2: exact copy; gamma: weaker, negated;
// delta: pure noise; omega: constant.
Dataset ranked_fixture(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<int> y(n);
  std::vector<double> alpha(n), gamma(n), delta(n), omega(n, 3.0);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = static_cast<int>(i % 2);
    alpha[i] = y[i] + 0.2 * rng.normal();
    gamma[i] = -static_cast<double>(y[i]) + 1.5 * rng.normal();
    delta[i] = rng.normal();
  }
  return columns_dataset(schema_of({"alpha", "alpha2", "gamma", "delta", "omega"}),
                         {alpha, alpha, gamma, delta, omega}, y);
}

// beta carries the clean signal but sits after alpha in schema order.
Dataset signal_fixture(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<int> y(n);
  std::vector<double> alpha(n), beta(n), noise(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = static_cast<int>(i % 2);
    alpha[i] = rng.normal();
    beta[i] = y[i] + 0.1 * rng.normal();
    noise[i] = rng.normal();
  }
  return columns_dataset(schema_of({"alpha", "beta", "noise"}), {alpha, beta, noise}, y);
}

SplitPair make_split(const Dataset& train, const Dataset& test) {
  SplitPair split;
  split.train = train;
  split.test = test;
  split.test_fraction = 0.25;
  split.seed = 0;
  return split;
}

}  // namespace

TEST_CASE("features rank by rank-correlation strength") {
  Dataset d = ranked_fixture(60, 3);
  RankedFeatures desc = rank_features(d);

  REQUIRE(desc.order.size() == 5);
  CHECK(desc.direction == RankOrder::Descending);
  // Identical columns tie on |rho|; schema order breaks the tie.
  CHECK(desc.order[0].name == "alpha");
  CHECK(desc.order[1].name == "alpha2");
  CHECK(desc.order[0].spearman == desc.order[1].spearman);
  CHECK(desc.order[2].name == "gamma");
  CHECK(desc.order[3].name == "delta");
  CHECK(desc.order[4].name == "omega");  // constant: unrankable, goes last
  CHECK(desc.order[4].spearman == 0.0);
  CHECK(desc.order[0].spearman > 0.0);
  CHECK(desc.order[2].spearman < 0.0);
  CHECK(std::fabs(desc.order[2].spearman) > std::fabs(desc.order[3].spearman));
  REQUIRE(desc.warnings.size() == 1);
  CHECK(desc.warnings[0].find("omega") != std::string::npos);

  RankedFeatures asc = rank_features(d, RankOrder::Ascending);
  CHECK(asc.direction == RankOrder::Ascending);
  std::vector<RankedFeature> reversed(desc.order.rbegin(), desc.order.rend());
  CHECK(asc.order == reversed);

  Dataset empty;
  empty.schema = d.schema;
  CHECK_THROWS_AS(rank_features(empty), InvalidArgument);

  Dataset flat = d;
  std::fill(flat.target.begin(), flat.target.end(), 1);
  CHECK_THROWS_AS(rank_features(flat), InvalidArgument);
}

TEST_CASE("forward selection takes the signal feature and stops") {
  Dataset d = signal_fixture(60, 7);
  FoldAssignment folds = stratified_kfold(d.target, 3, 1);
  HyperParams params = default_params(LearnerKind::LR);

  auto [subset, trace] = forward_select(LearnerKind::LR, d, 0.01, folds, params, 5);

  REQUIRE(!subset.names.empty());
  CHECK(subset.names[0] == "beta");  // strongest feature leads, despite schema order
  CHECK(subset.method == "forward");
  CHECK(subset.tolerance == 0.01);

  REQUIRE(trace.steps.size() >= 2);
  const SelectionStep& first = trace.steps[0];
  CHECK(first.step == 1);
  CHECK(first.feature == "beta");
  CHECK(first.added);
  CHECK(first.accepted);
  CHECK(first.auc_before == 0.5);  // empty-set baseline
  CHECK(first.auc_after > 0.9);
  CHECK(first.delta == first.auc_after - first.auc_before);
  CHECK(first.candidates_evaluated == 3);

  // The last record is the stopping decision, not a pick.
  const SelectionStep& last = trace.steps.back();
  CHECK_FALSE(last.accepted);
  CHECK(last.delta <= 0.01);

  // Every accepted step appears in the subset, in order.
  std::vector<std::string> accepted;
  for (const SelectionStep& s : trace.steps)
    if (s.accepted) accepted.push_back(s.feature);
  CHECK(accepted == subset.names);
}

TEST_CASE("an unreachable tolerance selects nothing") {
  Dataset d = signal_fixture(40, 11);
  FoldAssignment folds = stratified_kfold(d.target, 2, 2);
  auto [subset, trace] =
      forward_select(LearnerKind::LR, d, 0.6, folds, default_params(LearnerKind::LR), 5);

  CHECK(subset.names.empty());
  REQUIRE(trace.steps.size() == 1);
  CHECK_FALSE(trace.steps[0].accepted);
  CHECK_FALSE(trace.steps[0].feature.empty());  // best rejected candidate is recorded
}

TEST_CASE("selection guards its stopping-rule signs") {
  Dataset d = signal_fixture(40, 13);
  FoldAssignment folds = stratified_kfold(d.target, 2, 3);
  HyperParams params = default_params(LearnerKind::LR);

  CHECK_THROWS_AS(forward_select(LearnerKind::LR, d, 0.0, folds, params, 1), InvalidArgument);
  CHECK_THROWS_AS(forward_select(LearnerKind::LR, d, -0.1, folds, params, 1), InvalidArgument);
  CHECK_THROWS_AS(backward_eliminate(LearnerKind::LR, d, 0.001, folds, params, 1),
                  InvalidArgument);
  CHECK_THROWS_AS(forward_select_k(LearnerKind::LR, d, 0, folds, params, 1), InvalidArgument);
  CHECK_THROWS_AS(forward_select_k(LearnerKind::LR, d, 4, folds, params, 1), InvalidArgument);
}

TEST_CASE("fixed-size selections nest along the greedy path") {
  Dataset d = signal_fixture(60, 17);
  FoldAssignment folds = stratified_kfold(d.target, 3, 4);
  HyperParams params = default_params(LearnerKind::LR);

  std::vector<std::vector<std::string>> picks;
  for (int k = 1; k <= 3; ++k) {
    auto [subset, trace] = forward_select_k(LearnerKind::LR, d, k, folds, params, 9);
    CHECK(subset.method == "fixed");
    CHECK(subset.k == k);
    REQUIRE(subset.names.size() == static_cast<std::size_t>(k));
    // Fixed-k traces contain exactly k accepted additions.
    int accepted = 0;
    for (const SelectionStep& s : trace.steps) accepted += s.accepted ? 1 : 0;
    CHECK(accepted == k);
    picks.push_back(subset.names);
  }
  CHECK(std::equal(picks[0].begin(), picks[0].end(), picks[1].begin()));
  CHECK(std::equal(picks[1].begin(), picks[1].end(), picks[2].begin()));
}

TEST_CASE("backward elimination sheds noise and floors at one feature") {
  Dataset d = signal_fixture(60, 23);
  FoldAssignment folds = stratified_kfold(d.target, 3, 5);
  HyperParams params = default_params(LearnerKind::LR);

  auto [subset, trace] = backward_eliminate(LearnerKind::LR, d, -0.05, folds, params, 7);
  REQUIRE(!subset.names.empty());
  CHECK(subset.method == "backward");
  // The signal feature survives; removals are recorded as non-additions.
  CHECK(std::find(subset.names.begin(), subset.names.end(), "beta") != subset.names.end());
  for (const SelectionStep& s : trace.steps)
    CHECK_FALSE(s.added);
  // Names come back in schema order.
  std::vector<std::string> sorted_by_schema;
  for (const ColumnSpec& c : d.schema.columns)
    if (std::find(subset.names.begin(), subset.names.end(), c.name) != subset.names.end())
      sorted_by_schema.push_back(c.name);
  CHECK(subset.names == sorted_by_schema);

  // A bottomless tolerance strips everything down to the floor.
  auto [floor_subset, floor_trace] =
      backward_eliminate(LearnerKind::LR, d, -1.0, folds, params, 7);
  CHECK(floor_subset.names.size() == 1);
}

TEST_CASE("a sweep row is the same alone or inside the full sweep") {
  Dataset train = signal_fixture(60, 31);
  Dataset test = signal_fixture(24, 32);
  SplitPair split = make_split(train, test);
  RankedFeatures ranked = rank_features(train);
  SweepConfig config{2, 2, 2};
  std::vector<LearnerKind> kinds = {LearnerKind::LR};

  std::vector<SweepRow> full = filter_sweep(split, ranked, kinds, config, 77);
  REQUIRE(full.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(full[i].feature_count == static_cast<int>(i) + 1);

  std::vector<SweepRow> alone = filter_sweep_sizes(split, ranked, kinds, {2}, config, 77);
  REQUIRE(alone.size() == 1);
  const SweepRow& a = alone[0];
  const SweepRow& b = full[1];
  CHECK(a.feature_count == b.feature_count);
  REQUIRE(a.per_model.size() == b.per_model.size());
  for (std::size_t m = 0; m < a.per_model.size(); ++m) {
    CHECK(a.per_model[m].first == b.per_model[m].first);
    CHECK(a.per_model[m].second == b.per_model[m].second);
  }
  CHECK(a.avg_auc == b.avg_auc);
  CHECK(a.avg_far == b.avg_far);
}

TEST_CASE("sweep averages are the plain mean over models") {
  Dataset train = signal_fixture(60, 41);
  Dataset test = signal_fixture(24, 42);
  SplitPair split = make_split(train, test);
  RankedFeatures ranked = rank_features(train);
  std::vector<LearnerKind> kinds = {LearnerKind::LR, LearnerKind::SVM};

  std::vector<SweepRow> rows =
      filter_sweep_sizes(split, ranked, kinds, {3}, SweepConfig{2, 2, 2}, 81);
  REQUIRE(rows.size() == 1);
  const SweepRow& row = rows[0];
  REQUIRE(row.per_model.size() == 2);

  double acc = 0.0, rec = 0.0, f1 = 0.0, auc = 0.0, far = 0.0;
  for (const auto& [kind, m] : row.per_model) {
    acc += m.accuracy;
    rec += m.recall;
    f1 += m.f1;
    REQUIRE(m.auc.has_value());
    auc += *m.auc;
    far += m.far;
  }
  CHECK(row.avg_accuracy == acc / 2.0);
  CHECK(row.avg_recall == rec / 2.0);
  CHECK(row.avg_f1 == f1 / 2.0);
  CHECK(row.avg_auc == auc / 2.0);
  CHECK(row.avg_far == far / 2.0);
}

TEST_CASE("sweeps validate their inputs") {
  Dataset train = signal_fixture(40, 51);
  Dataset test = signal_fixture(16, 52);
  SplitPair split = make_split(train, test);
  RankedFeatures ranked = rank_features(train);
  SweepConfig config{2, 2, 2};

  CHECK_THROWS_AS(filter_sweep_sizes(split, ranked, {LearnerKind::LR}, {0}, config, 1),
                  InvalidArgument);
  CHECK_THROWS_AS(filter_sweep_sizes(split, ranked, {LearnerKind::LR}, {4}, config, 1),
                  InvalidArgument);
  CHECK_THROWS_AS(filter_sweep_sizes(split, ranked, {LearnerKind::LR, LearnerKind::LR}, {1},
                                     config, 1),
                  InvalidArgument);
  CHECK_THROWS_AS(
      filter_sweep_sizes(split, ranked, {LearnerKind::LR}, {1}, SweepConfig{0, 2, 2}, 1),
      InvalidArgument);

  RankedFeatures partial = ranked;
  partial.order.pop_back();
  CHECK_THROWS_AS(filter_sweep_sizes(split, partial, {LearnerKind::LR}, {1}, config, 1),
                  InvalidArgument);
}

TEST_CASE("the wrapper protocol never reads the test targets while selecting") {
  Dataset train = signal_fixture(60, 61);
  Dataset test = signal_fixture(20, 62);
  SplitPair split = make_split(train, test);

  SplitPair flipped = split;
  for (int& t : flipped.test.target) t = 1 - t;

  ProtocolConfig config{2, 2, 2};
  WrapperMethod method = WrapperMethod::forward(0.01);
  ProtocolReport a = run_wrapper_protocol(LearnerKind::LR, split, method, config, 5);
  ProtocolReport b = run_wrapper_protocol(LearnerKind::LR, flipped, method, config, 5);

  CHECK(a.params_pre == b.params_pre);
  CHECK(a.params_post == b.params_post);
  CHECK(a.subset.names == b.subset.names);
  CHECK(a.cv_auc_pre == b.cv_auc_pre);
  CHECK(a.cv_auc_post == b.cv_auc_post);
  CHECK(a.trace.steps.size() == b.trace.steps.size());
  // The test side still matters where it should: scoring.
  CHECK(a.test_metrics.accuracy != b.test_metrics.accuracy);

  CHECK(a.kind == LearnerKind::LR);
  CHECK(a.method.name() == "forward");
  CHECK(a.cv_auc_pre > 0.5);
  CHECK_FALSE(a.degenerate);
}

TEST_CASE("an empty selection degrades to a majority-class report") {
  // Noise-only features with a 40/60 class split: nothing clears tol = 0.45.
  Rng rng(71);
  std::vector<int> y(60);
  std::vector<double> a(60), b(60);
  for (std::size_t i = 0; i < 60; ++i) {
    y[i] = i % 5 < 2 ? 1 : 0;  // 24 positives
    a[i] = rng.normal();
    b[i] = rng.normal();
  }
  Dataset train = columns_dataset(schema_of({"a", "b"}), {a, b}, y);

  std::vector<int> ty(20);
  std::vector<double> ta(20), tb(20);
  for (std::size_t i = 0; i < 20; ++i) {
    ty[i] = i % 5 < 2 ? 1 : 0;  // 8 positives, 12 negatives
    ta[i] = rng.normal();
    tb[i] = rng.normal();
  }
  Dataset test = columns_dataset(schema_of({"a", "b"}), {ta, tb}, ty);

  ProtocolReport report = run_wrapper_protocol(
      LearnerKind::LR, make_split(train, test), WrapperMethod::forward(0.45),
      ProtocolConfig{2, 2, 2}, 3);

  CHECK(report.degenerate);
  CHECK(report.subset.names.empty());
  CHECK(report.params_post == report.params_pre);
  CHECK(report.cv_auc_post == 0.5);
  // Majority is negative: everything predicted 0, so FAR sits on the footnote.
  CHECK(report.test_metrics.accuracy == doctest::Approx(0.6));
  CHECK(report.test_metrics.recall == 0.0);
  CHECK(report.test_metrics.far == 1.0);
  REQUIRE(report.test_metrics.auc.has_value());
  CHECK(*report.test_metrics.auc == 0.5);
}

TEST_CASE("wrapper method factories") {
  WrapperMethod f = WrapperMethod::forward(0.01);
  CHECK(f.name() == "forward");
  CHECK(f.tolerance_or_k() == 0.01);

  WrapperMethod back = WrapperMethod::backward(-0.003);
  CHECK(back.name() == "backward");
  CHECK(back.tolerance_or_k() == -0.003);

  WrapperMethod fixed = WrapperMethod::fixed_k(5);
  CHECK(fixed.name() == "fixed");
  CHECK(fixed.tolerance_or_k() == 5.0);
}

TEST_CASE("protocol reports survive a json round trip") {
  Dataset train = signal_fixture(50, 81);
  Dataset test = signal_fixture(20, 82);
  ProtocolReport report = run_wrapper_protocol(
      LearnerKind::GBT, make_split(train, test), WrapperMethod::fixed_k(2),
      ProtocolConfig{2, 2, 2}, 9);

  ProtocolReport back = protocol_report_from_json(to_json(report));
  CHECK(back.kind == report.kind);
  CHECK(back.method.name() == report.method.name());
  CHECK(back.method.tolerance_or_k() == report.method.tolerance_or_k());
  CHECK(back.params_pre == report.params_pre);
  CHECK(back.params_post == report.params_post);
  CHECK(back.cv_auc_pre == report.cv_auc_pre);
  CHECK(back.cv_auc_post == report.cv_auc_post);
  CHECK(back.subset.names == report.subset.names);
  CHECK(back.subset.method == report.subset.method);
  CHECK(back.degenerate == report.degenerate);
  CHECK(back.test_metrics == report.test_metrics);
  REQUIRE(back.trace.steps.size() == report.trace.steps.size());
  for (std::size_t i = 0; i < report.trace.steps.size(); ++i) {
    CHECK(back.trace.steps[i].step == report.trace.steps[i].step);
    CHECK(back.trace.steps[i].feature == report.trace.steps[i].feature);
    CHECK(back.trace.steps[i].accepted == report.trace.steps[i].accepted);
    CHECK(back.trace.steps[i].delta == report.trace.steps[i].delta);
  }

  CHECK_THROWS_AS(protocol_report_from_json("nope"), ParseError);
  CHECK_THROWS_AS(protocol_report_from_json("{\"format_version\": 99}"), ParseError);
}
