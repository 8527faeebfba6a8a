#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "subsetforge/common.hpp"

namespace subsetforge {

enum class LearnerKind { LR, SVM, RF, ANN, GBT, SBEL };

constexpr std::size_t kLearnerKindCount = 6;

// All six kinds in canonical order (also the report column order).
const std::vector<LearnerKind>& all_learner_kinds();

// The five base kinds used by the stacking ensemble, in meta-feature order.
const std::vector<LearnerKind>& base_learner_kinds();

std::string kind_name(LearnerKind kind);                // "LR", "GBT", ...
std::string kind_display_name(LearnerKind kind);        // "GBT" renders as "XGBoost"
LearnerKind kind_from_name(const std::string& name);    // accepts both spellings

// Flat key -> value map. Stacking parameters nest via prefixes
// ("meta.C", "lr.C", "gbt.rounds", ...).
class HyperParams {
 public:
  HyperParams() = default;

  double get(const std::string& key) const;
  double get_or(const std::string& key, double fallback) const;
  bool has(const std::string& key) const { return values_.count(key) > 0; }
  void set(const std::string& key, double value) { values_[key] = value; }

  const std::map<std::string, double>& values() const { return values_; }

  // Keys with the given prefix ("lr."), prefix stripped.
  HyperParams with_prefix_stripped(const std::string& prefix) const;

  bool operator==(const HyperParams&) const = default;

 private:
  std::map<std::string, double> values_;
};

HyperParams default_params(LearnerKind kind);

// Rejects unknown keys and values outside the declared per-key bounds.
void validate_params(LearnerKind kind, const HyperParams& params);

struct LogisticModel {
  std::vector<double> weights;
  double intercept = 0.0;
};

struct LinearSvmModel {
  std::vector<double> weights;
  double bias = 0.0;
};

struct TreeNode {
  int feature = -1;          // -1 marks a leaf
  double threshold = 0.0;    // go left when x[feature] <= threshold
  int left = -1;
  int right = -1;
  double value = 0.0;        // leaf payload: RF vote (0/1), GBT scaled weight
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  double predict(const double* row) const;
};

struct ForestModel {
  std::vector<DecisionTree> trees;
};

struct NeuralNetModel {
  std::size_t inputs = 0;
  std::size_t hidden = 0;
  std::vector<double> w1;  // hidden x inputs, row-major
  std::vector<double> b1;  // hidden
  std::vector<double> w2;  // hidden
  double b2 = 0.0;
};

struct BoostedTreesModel {
  double base_score = 0.0;          // initial log-odds
  std::vector<DecisionTree> trees;  // leaf values already scaled by the learning rate
  std::vector<double> train_loss;   // per-round training log-loss, audit trail
};

struct TrainedModel;

struct StackingAudit {
  bool passed = false;
  std::size_t rows_checked = 0;  // training rows audited; each is verified against every base model
};

struct StackedModel {
  std::vector<TrainedModel> bases;  // refit on the full training data
  LogisticModel meta;
  double svm_lo = 0.0;  // train-margin bounds for rescaling SVM scores
  double svm_hi = 1.0;
  StackingAudit audit;
};

struct TrainedModel {
  LearnerKind kind = LearnerKind::LR;
  HyperParams params;
  std::vector<std::string> feature_names;
  std::uint64_t train_seed = 0;

  // Exactly one is set, matching kind.
  std::shared_ptr<const LogisticModel> logistic;
  std::shared_ptr<const LinearSvmModel> svm;
  std::shared_ptr<const ForestModel> forest;
  std::shared_ptr<const NeuralNetModel> net;
  std::shared_ptr<const BoostedTreesModel> boosted;
  std::shared_ptr<const StackedModel> stacked;
};

// Deterministic given (inputs, params, seed). Throws on a single-class
// target or non-finite features. feature_names may be empty (filled with
// generic names).
TrainedModel fit(LearnerKind kind, const HyperParams& params, const Matrix& features,
                 const std::vector<int>& target, std::uint64_t seed,
                 std::vector<std::string> feature_names = {});

// LR/ANN/GBT/SBEL: probabilities; RF: positive-vote fraction; SVM: margins.
std::vector<double> predict_scores(const TrainedModel& model, const Matrix& features);

// 1 when score >= threshold.
std::vector<int> predict_labels(const TrainedModel& model, const Matrix& features,
                                double threshold);
std::vector<int> predict_labels(const TrainedModel& model, const Matrix& features);

// 0.5 for probability-scoring kinds, 0.0 for SVM margins.
double default_threshold(LearnerKind kind);

// Explicit stacking entry point: out-of-fold base scores feed the
// logistic meta-learner, then the bases are refit on the full data.
TrainedModel fit_stacked(const std::map<LearnerKind, HyperParams>& base_params,
                         const HyperParams& meta_params, const Matrix& features,
                         const std::vector<int>& target, int k, std::uint64_t seed,
                         std::vector<std::string> feature_names = {});

std::string to_json(const TrainedModel& model);
TrainedModel trained_model_from_json(const std::string& text);

}  // namespace subsetforge
