#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "subsetforge/common.hpp"
#include "subsetforge/dataset.hpp"
#include "subsetforge/folds.hpp"
#include "subsetforge/learners.hpp"
#include "subsetforge/metrics.hpp"

namespace subsetforge {

enum class RankOrder { Descending, Ascending };

struct RankedFeature {
  std::string name;
  double spearman = 0.0;  // signed

  bool operator==(const RankedFeature&) const = default;
};

struct RankedFeatures {
  std::vector<RankedFeature> order;  // every predictor exactly once
  RankOrder direction = RankOrder::Descending;
  std::vector<std::string> warnings;  // constant predictors (ranked last, rho 0)
};

// Spearman correlation of each predictor against the target, sorted by |rho|;
// ties broken by schema order. A constant predictor cannot be ranked, so it
// goes last with rho recorded as 0 and a warning. Ascending order is the
// exact reverse of descending.
RankedFeatures rank_features(const Dataset& dataset,
                             RankOrder order = RankOrder::Descending);

struct FeatureSubset {
  std::vector<std::string> names;  // forward/fixed: selection order; backward: schema order
  std::string method;              // "forward" | "backward" | "fixed"
  double tolerance = 0.0;          // stopping rule (forward/backward)
  int k = 0;                       // target size (fixed)
};

struct SelectionStep {
  int step = 0;
  int candidates_evaluated = 0;
  std::string feature;   // chosen, or the best rejected candidate when !accepted
  bool added = true;     // false for removals
  bool accepted = true;  // false marks the final stopping-rule record
  double auc_before = 0.0;
  double auc_after = 0.0;
  double delta = 0.0;
};

struct SelectionTrace {
  std::vector<SelectionStep> steps;
};

// Greedy wrapper selection. One fold assignment serves every candidate
// evaluation, and every candidate subset is canonicalized to schema column
// order before fitting, so a subset's cv-AUC is a pure function of its
// members. Candidates are walked in |Spearman|-rank order, which doubles as
// the tie-break; the baseline cv-AUC of the empty set is 0.5.
//
// forward_select adds the best candidate while its improvement strictly
// exceeds `tolerance` (> 0); an empty result is possible and not an error.
std::pair<FeatureSubset, SelectionTrace> forward_select(LearnerKind kind, const Dataset& train,
                                                        double tolerance,
                                                        const FoldAssignment& folds,
                                                        const HyperParams& params,
                                                        std::uint64_t seed);

// Starts from all predictors and removes the least-damaging feature while
// that removal's AUC delta is at least `tolerance` (a negative number);
// never shrinks below one feature.
std::pair<FeatureSubset, SelectionTrace> backward_eliminate(LearnerKind kind,
                                                            const Dataset& train,
                                                            double tolerance,
                                                            const FoldAssignment& folds,
                                                            const HyperParams& params,
                                                            std::uint64_t seed);

// forward_select without a stopping rule: exactly k greedy additions.
std::pair<FeatureSubset, SelectionTrace> forward_select_k(LearnerKind kind,
                                                          const Dataset& train, int k,
                                                          const FoldAssignment& folds,
                                                          const HyperParams& params,
                                                          std::uint64_t seed);

struct SweepRow {
  int feature_count = 0;
  std::vector<std::pair<LearnerKind, MetricsBundle>> per_model;
  double avg_accuracy = 0.0;
  double avg_recall = 0.0;
  double avg_f1 = 0.0;
  double avg_auc = 0.0;
  double avg_far = 0.0;
};

struct SweepConfig {
  int budget = 15;      // randomized-search trials per (size, kind)
  int cv_folds = 5;
  int sbel_folds = 5;   // inner stacking folds
};

// One row per requested prefix size of the ranking: tune each kind on the
// training split restricted to the prefix, refit with the winner, evaluate on
// the test split. A row's seeds derive from its size alone, so a row is the
// same whether computed alone or as part of the full 1..29 sweep, and the
// all-features row is identical for ascending and descending rankings.
std::vector<SweepRow> filter_sweep_sizes(const SplitPair& split, const RankedFeatures& ranked,
                                         const std::vector<LearnerKind>& kinds,
                                         const std::vector<int>& sizes,
                                         const SweepConfig& config, std::uint64_t seed);

// The full sweep: prefix sizes 1 through all predictors.
std::vector<SweepRow> filter_sweep(const SplitPair& split, const RankedFeatures& ranked,
                                   const std::vector<LearnerKind>& kinds,
                                   const SweepConfig& config, std::uint64_t seed);

struct WrapperMethod {
  enum class Kind { Forward, Backward, FixedK };

  Kind kind = Kind::Forward;
  double tolerance = 0.001;
  int k = 5;

  static WrapperMethod forward(double tolerance);
  static WrapperMethod backward(double tolerance);
  static WrapperMethod fixed_k(int k);

  std::string name() const;       // "forward" | "backward" | "fixed"
  double tolerance_or_k() const;  // the value serialized next to the name
};

struct ProtocolConfig {
  int budget = 30;
  int cv_folds = 5;
  int sbel_folds = 5;
};

struct ProtocolReport {
  LearnerKind kind = LearnerKind::LR;
  WrapperMethod method;
  HyperParams params_pre;
  HyperParams params_post;
  double cv_auc_pre = 0.0;
  double cv_auc_post = 0.0;
  FeatureSubset subset;
  SelectionTrace trace;
  MetricsBundle test_metrics;
  bool degenerate = false;  // empty subset: metrics come from a majority-class stand-in
};

// The tune-select-retune pipeline: search hyperparameters on all predictors,
// run the chosen selection method with the winners, search again restricted
// to the selected subset, then refit and score the test split. An empty
// subset falls back to a majority-class predictor (marked degenerate) whose
// metrics keep the footnote FAR convention.
ProtocolReport run_wrapper_protocol(LearnerKind kind, const SplitPair& split,
                                    const WrapperMethod& method, const ProtocolConfig& config,
                                    std::uint64_t seed);

std::string to_json(const ProtocolReport& report);
ProtocolReport protocol_report_from_json(const std::string& text);

}  // namespace subsetforge
