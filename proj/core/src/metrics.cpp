#include "subsetforge/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "json.hpp"

namespace subsetforge {

ConfusionMatrix confusion_matrix(const std::vector<int>& actual,
                                 const std::vector<int>& predicted) {
  if (actual.size() != predicted.size())
    throw InvalidArgument("confusion_matrix: length mismatch");
  if (actual.empty()) throw InvalidArgument("confusion_matrix: empty input");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    int a = actual[i], p = predicted[i];
    if ((a != 0 && a != 1) || (p != 0 && p != 1))
      throw InvalidArgument("confusion_matrix: labels must be 0 or 1");
    if (a == 1)
      (p == 1 ? cm.tp : cm.fn)++;
    else
      (p == 1 ? cm.fp : cm.tn)++;
  }
  return cm;
}

MetricsBundle classification_metrics(const ConfusionMatrix& cm) {
  if (cm.tp < 0 || cm.tn < 0 || cm.fp < 0 || cm.fn < 0)
    throw InvalidArgument("classification_metrics: negative count");
  long long total = cm.total();
  if (total <= 0) throw InvalidArgument("classification_metrics: empty confusion matrix");

  MetricsBundle b;
  b.accuracy = static_cast<double>(cm.tp + cm.tn) / static_cast<double>(total);
  long long predicted_pos = cm.tp + cm.fp;
  long long actual_pos = cm.tp + cm.fn;
  long long actual_neg = cm.fp + cm.tn;
  b.precision = predicted_pos == 0
                    ? 0.0
                    : static_cast<double>(cm.tp) / static_cast<double>(predicted_pos);
  b.recall = actual_pos == 0 ? 0.0
                             : static_cast<double>(cm.tp) / static_cast<double>(actual_pos);
  b.f1 = (b.precision + b.recall) == 0.0
             ? 0.0
             : 2.0 * b.precision * b.recall / (b.precision + b.recall);
  if (actual_neg == 0)
    b.far = 0.0;  // no actual negatives: nothing to falsely accept
  else if (predicted_pos == 0)
    b.far = 1.0;  // no predicted positives: pinned to the worst case
  else
    b.far = static_cast<double>(cm.fp) / static_cast<double>(actual_neg);
  return b;
}

namespace {

void check_scored_input(const std::vector<int>& actual, const std::vector<double>& scores) {
  if (actual.size() != scores.size()) throw InvalidArgument("roc_auc: length mismatch");
  if (actual.empty()) throw InvalidArgument("roc_auc: empty input");
  long long pos = 0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    if (actual[i] != 0 && actual[i] != 1)
      throw InvalidArgument("roc_auc: labels must be 0 or 1");
    if (!std::isfinite(scores[i])) throw InvalidArgument("roc_auc: non-finite score");
    pos += actual[i];
  }
  if (pos == 0 || pos == static_cast<long long>(actual.size()))
    throw InvalidArgument("roc_auc: both classes must be present");
}

}  // namespace

RocResult roc_auc(const std::vector<int>& actual, const std::vector<double>& scores) {
  check_scored_input(actual, scores);
  std::size_t n = actual.size();
  double n_pos = 0.0;
  for (int a : actual) n_pos += a;
  double n_neg = static_cast<double>(n) - n_pos;

  // Rank statistic: mean rank of positives, ties averaged.
  std::vector<double> ranks = average_ranks(scores);
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    if (actual[i] == 1) rank_sum += ranks[i];
  double auc = (rank_sum - n_pos * (n_pos + 1.0) / 2.0) / (n_pos * n_neg);

  // Curve: sweep thresholds from high to low, one point per distinct score.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });
  RocCurve curve;
  curve.points.push_back({0.0, 0.0});
  long long tp = 0, fp = 0;
  std::size_t i = 0;
  while (i < n) {
    double s = scores[order[i]];
    while (i < n && scores[order[i]] == s) {
      (actual[order[i]] == 1 ? tp : fp)++;
      ++i;
    }
    curve.points.push_back({static_cast<double>(fp) / n_neg,
                            static_cast<double>(tp) / n_pos});
  }
  return {std::move(curve), auc};
}

std::vector<double> average_ranks(const std::vector<double>& values) {
  std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b];
  });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw InvalidArgument("pearson: length mismatch");
  std::size_t n = x.size();
  if (n < 2) throw InvalidArgument("pearson: need at least 2 observations");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0)
    throw InvalidArgument("pearson: correlation undefined for a constant vector");
  return sxy / std::sqrt(sxx * syy);
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw InvalidArgument("spearman: length mismatch");
  if (x.size() < 2) throw InvalidArgument("spearman: need at least 2 observations");
  for (double v : x)
    if (!std::isfinite(v)) throw InvalidArgument("spearman: non-finite value");
  for (double v : y)
    if (!std::isfinite(v)) throw InvalidArgument("spearman: non-finite value");
  return pearson(average_ranks(x), average_ranks(y));
}

MetricsBundle evaluate_scores(const std::vector<int>& actual,
                              const std::vector<double>& scores,
                              double threshold) {
  if (actual.size() != scores.size())
    throw InvalidArgument("evaluate_scores: length mismatch");
  std::vector<int> labels(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i)
    labels[i] = scores[i] >= threshold ? 1 : 0;
  MetricsBundle b = classification_metrics(confusion_matrix(actual, labels));
  b.auc = roc_auc(actual, scores).auc;
  return b;
}

std::string to_json(const MetricsBundle& b) {
  nlohmann::json j;
  j["accuracy"] = b.accuracy;
  j["precision"] = b.precision;
  j["recall"] = b.recall;
  j["f1"] = b.f1;
  j["far"] = b.far;
  if (b.auc)
    j["auc"] = *b.auc;
  else
    j["auc"] = nullptr;
  return j.dump();
}

MetricsBundle metrics_bundle_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  MetricsBundle b;
  b.accuracy = j.at("accuracy").get<double>();
  b.precision = j.at("precision").get<double>();
  b.recall = j.at("recall").get<double>();
  b.f1 = j.at("f1").get<double>();
  b.far = j.at("far").get<double>();
  if (j.contains("auc") && !j.at("auc").is_null()) b.auc = j.at("auc").get<double>();
  return b;
}

}  // namespace subsetforge
