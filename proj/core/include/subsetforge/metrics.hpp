#pragma once

#include <optional>
#include <string>
#include <vector>

#include "subsetforge/common.hpp"

namespace subsetforge {

// Positive class is survival (target = 1) throughout.
struct ConfusionMatrix {
  long long tp = 0;
  long long tn = 0;
  long long fp = 0;
  long long fn = 0;

  long long total() const { return tp + tn + fp + fn; }
  bool operator==(const ConfusionMatrix&) const = default;
};

struct MetricsBundle {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double far = 0.0;
  std::optional<double> auc;  // absent for label-only evaluation

  bool operator==(const MetricsBundle&) const = default;
};

// Points are (far, recall), ascending, from (0,0) to (1,1).
struct RocPoint {
  double far = 0.0;
  double recall = 0.0;
};

struct RocCurve {
  std::vector<RocPoint> points;
};

ConfusionMatrix confusion_matrix(const std::vector<int>& actual,
                                 const std::vector<int>& predicted);

// Degenerate conventions:
//   precision = 0 when tp+fp = 0; recall = 0 when tp+fn = 0; f1 = 0 when
//   precision+recall = 0; far = 0 when fp+tn = 0 (no actual negatives),
//   otherwise far = 1 when tp+fp = 0 (no predicted positives),
//   otherwise far = fp/(fp+tn).
MetricsBundle classification_metrics(const ConfusionMatrix& cm);

struct RocResult {
  RocCurve curve;
  double auc = 0.0;
};

// AUC by the Mann-Whitney rank statistic (ties count one half); the
// trapezoidal area under the returned curve agrees to within 1e-9.
RocResult roc_auc(const std::vector<int>& actual, const std::vector<double>& scores);

// 1-based average ranks (ties share the mean of their positions).
std::vector<double> average_ranks(const std::vector<double>& values);

double pearson(const std::vector<double>& x, const std::vector<double>& y);

// Pearson correlation of average-ranked values (standard tie correction).
// Throws InvalidArgument when either vector is constant.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

// Threshold the scores, build the confusion matrix, and attach the AUC.
MetricsBundle evaluate_scores(const std::vector<int>& actual,
                              const std::vector<double>& scores,
                              double threshold);

std::string to_json(const MetricsBundle& bundle);
MetricsBundle metrics_bundle_from_json(const std::string& text);

}  // namespace subsetforge
