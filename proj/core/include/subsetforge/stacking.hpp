#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "subsetforge/common.hpp"
#include "subsetforge/folds.hpp"
#include "subsetforge/learners.hpp"

namespace subsetforge {

struct OofMetaFeatures {
  Matrix values;  // n_rows x base-kind count, columns in base_learner_kinds order
  StackingAudit audit;
  double svm_lo = 0.0;  // bounds of the raw out-of-fold SVM margin column
  double svm_hi = 1.0;
};

// Out-of-fold base-learner scores: the model scoring row i was fit with
// fold(i) held out. The SVM column is min-max rescaled to [0,1] after its
// bounds are recorded. The audit re-verifies the held-out bookkeeping
// explicitly rather than trusting it by construction.
OofMetaFeatures compute_oof_meta_features(const std::map<LearnerKind, HyperParams>& base_params,
                                          const Matrix& features,
                                          const std::vector<int>& target,
                                          const FoldAssignment& folds, std::uint64_t seed);

// The meta-parameter-independent part of a stacked fit: inner fold draw,
// out-of-fold meta features, full-data base refits, and the refit SVM margin
// bounds. fit_stacked = precompute + assemble, so a meta-only search can
// reuse one precompute across trials without changing any number.
struct StackedPrecompute {
  Matrix oof_values;
  StackingAudit audit;
  std::vector<TrainedModel> bases;
  double svm_lo = 0.0;
  double svm_hi = 1.0;
  std::vector<std::string> feature_names;
};

StackedPrecompute precompute_stacked(const std::map<LearnerKind, HyperParams>& base_params,
                                     const Matrix& features, const std::vector<int>& target,
                                     int k, std::uint64_t seed,
                                     std::vector<std::string> feature_names);

TrainedModel assemble_stacked(const StackedPrecompute& pre,
                              const std::map<LearnerKind, HyperParams>& base_params,
                              const HyperParams& meta_params, const std::vector<int>& target,
                              int k, std::uint64_t seed);

// Flat SBEL keys -> per-base parameter sets: each base kind's defaults
// overlaid with the matching "lr."/"svm."/... prefixed entries.
std::map<LearnerKind, HyperParams> sbel_base_params(const HyperParams& params);

}  // namespace subsetforge
