#include <doctest.h>

#include <cmath>

#include "subsetforge/metrics.hpp"

using namespace subsetforge;

TEST_CASE("confusion matrix counts all four cells") {
  //             actual:    1  1  0  0  1  0
  //             predicted: 1  0  0  1  1  0
  ConfusionMatrix cm = confusion_matrix({1, 1, 0, 0, 1, 0}, {1, 0, 0, 1, 1, 0});
  CHECK(cm.tp == 2);
  CHECK(cm.fn == 1);
  CHECK(cm.fp == 1);
  CHECK(cm.tn == 2);
  CHECK_THROWS_AS(confusion_matrix({1, 0}, {1}), InvalidArgument);
}

TEST_CASE("classification metrics on a hand-computed matrix") {
  MetricsBundle m = classification_metrics({/*tp=*/6, /*tn=*/8, /*fp=*/2, /*fn=*/4});
  CHECK(m.accuracy == doctest::Approx(14.0 / 20).epsilon(1e-12));
  CHECK(m.precision == doctest::Approx(6.0 / 8).epsilon(1e-12));
  CHECK(m.recall == doctest::Approx(6.0 / 10).epsilon(1e-12));
  double p = 0.75, r = 0.6;
  CHECK(m.f1 == doctest::Approx(2 * p * r / (p + r)).epsilon(1e-12));
  CHECK(m.far == doctest::Approx(2.0 / 10).epsilon(1e-12));
  CHECK(!m.auc.has_value());
}

TEST_CASE("far precedence: no actual negatives beats no predicted positives") {
  // fp + tn = 0 and tp + fp = 0 simultaneously: the no-negatives rule wins.
  CHECK(classification_metrics({0, 0, 0, 3}).far == 0.0);
  // No predicted positives but negatives exist: the footnote pins FAR to 1.
  CHECK(classification_metrics({0, 5, 0, 2}).far == 1.0);
}

TEST_CASE("empty matrix is an error") {
  CHECK_THROWS_AS(classification_metrics({0, 0, 0, 0}), Error);
}

TEST_CASE("roc auc on a hand-checked arrangement with ties") {
  // scores: pos {0.9, 0.5}, neg {0.5, 0.1}
  // pairs: (0.9,0.5)=1, (0.9,0.1)=1, (0.5,0.5)=0.5, (0.5,0.1)=1 -> 3.5/4
  RocResult r = roc_auc({1, 0, 1, 0}, {0.9, 0.5, 0.5, 0.1});
  CHECK(r.auc == doctest::Approx(0.875).epsilon(1e-12));
  CHECK(r.curve.points.front().far == 0.0);
  CHECK(r.curve.points.front().recall == 0.0);
  CHECK(r.curve.points.back().far == 1.0);
  CHECK(r.curve.points.back().recall == 1.0);
}

TEST_CASE("roc auc is 1 for perfect separation and 0.5 for constant scores") {
  CHECK(roc_auc({1, 1, 0, 0}, {0.8, 0.7, 0.3, 0.2}).auc == doctest::Approx(1.0));
  CHECK(roc_auc({1, 1, 0, 0}, {0.4, 0.4, 0.4, 0.4}).auc == doctest::Approx(0.5));
  CHECK_THROWS_AS(roc_auc({1, 1}, {0.1, 0.2}), InvalidArgument);
}

TEST_CASE("average ranks share tie positions") {
  std::vector<double> r = average_ranks({10, 30, 20, 30});
  CHECK(r == std::vector<double>{1, 3.5, 2, 3.5});
}

TEST_CASE("spearman matches known values and rejects constants") {
  std::vector<double> x{1, 2, 3, 4, 5};
  std::vector<double> inc{2, 4, 6, 8, 10};
  std::vector<double> dec{5, 4, 3, 2, 1};
  CHECK(spearman(x, inc) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(spearman(x, dec) == doctest::Approx(-1.0).epsilon(1e-12));
  // Monotone but nonlinear: rank correlation still +-1, unlike Pearson.
  std::vector<double> cubed{1, 8, 27, 64, 125};
  CHECK(spearman(x, cubed) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::fabs(pearson(x, cubed)) < 1.0);
  CHECK_THROWS_AS(spearman(x, {3, 3, 3, 3, 3}), InvalidArgument);
}

TEST_CASE("spearman with ties uses average ranks (tie correction)") {
  // Hand value: x ranks {1.5, 1.5, 3, 4}, y ranks {1, 2, 3.5, 3.5};
  // Pearson of those rank vectors = 0.888835...
  std::vector<double> x{1, 1, 2, 3};
  std::vector<double> y{4, 5, 6, 6};
  CHECK(spearman(x, y) ==
        doctest::Approx(pearson({1.5, 1.5, 3, 4}, {1, 2, 3.5, 3.5})).epsilon(1e-12));
}

TEST_CASE("evaluate_scores thresholds, attaches auc, and keeps conventions") {
  MetricsBundle m = evaluate_scores({1, 0, 1, 0}, {0.9, 0.2, 0.6, 0.7}, 0.5);
  CHECK(m.accuracy == doctest::Approx(0.75));
  REQUIRE(m.auc.has_value());
  CHECK(*m.auc == doctest::Approx(0.75));
  // All-negative predictions with negatives present: footnote FAR.
  MetricsBundle none = evaluate_scores({1, 0, 1, 0}, {0.1, 0.1, 0.2, 0.3}, 0.5);
  CHECK(none.far == 1.0);
}

TEST_CASE("metrics bundle json round-trips including an absent auc") {
  MetricsBundle m = classification_metrics({3, 4, 1, 2});
  CHECK(metrics_bundle_from_json(to_json(m)) == m);
  m.auc = 0.91;
  CHECK(metrics_bundle_from_json(to_json(m)) == m);
}
