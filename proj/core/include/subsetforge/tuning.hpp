#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "subsetforge/common.hpp"
#include "subsetforge/folds.hpp"
#include "subsetforge/learners.hpp"

namespace subsetforge {

struct CvResult {
  double mean_auc = 0.0;
  std::vector<double> fold_aucs;        // NaN for skipped folds
  std::vector<std::string> warnings;    // one per skipped fold
};

// Mean held-out AUC over the folds: for each fold, fit on the other folds and
// score the held-out rows. The per-fold fit seed derives from the held-out
// row set itself (not the fold index), so permuting fold labels cannot change
// the result. Folds whose training or held-out side is single-class are
// skipped with a warning; if every fold is skipped, this is an error.
CvResult cv_auc_detail(LearnerKind kind, const HyperParams& params, const Matrix& features,
                       const std::vector<int>& target, const FoldAssignment& folds,
                       std::uint64_t seed);
double cv_auc(LearnerKind kind, const HyperParams& params, const Matrix& features,
              const std::vector<int>& target, const FoldAssignment& folds,
              std::uint64_t seed);

struct ParamDistribution {
  enum class Kind { Uniform, LogUniform, UniformInt, Categorical };

  Kind kind = Kind::Uniform;
  double lo = 0.0;
  double hi = 0.0;
  std::vector<double> choices;  // Categorical only

  static ParamDistribution uniform(double lo, double hi);
  static ParamDistribution log_uniform(double lo, double hi);
  static ParamDistribution uniform_int(long long lo, long long hi);
  static ParamDistribution categorical(std::vector<double> choices);
  static ParamDistribution point(double value) { return categorical({value}); }

  // True when every draw returns the same value.
  bool single_point() const;

  double sample(Rng& rng) const;
};

// One distribution per hyperparameter key; sampling walks keys in map order.
struct SearchSpace {
  std::map<std::string, ParamDistribution> dists;

  HyperParams sample(Rng& rng) const;
};

// The default spaces swept by the evaluation protocol. Fixed protocol
// constants (LR iteration caps, RF bootstrap, SBEL fold count) enter as
// point distributions.
SearchSpace default_search_space(LearnerKind kind);

struct TrialResult {
  int index = 0;
  HyperParams params;
  double cv_auc = 0.0;  // meaningful only when ok
  bool ok = false;
  std::string error;
};

struct SearchResult {
  HyperParams best_params;
  double best_cv_auc = 0.0;
  std::vector<TrialResult> trials;  // exactly `budget` entries
};

// Draws `budget` parameter settings up front from one seeded stream (so a
// smaller budget's trials are a prefix of a larger one's), scores each with
// cv_auc under the shared fold assignment, and returns the argmax
// (ties -> earliest trial). Failing trials record their diagnostic and are
// skipped; all trials failing is an error. Trials may evaluate concurrently;
// results are aggregated in trial order, so the outcome is thread-count
// independent. When every sampled setting agrees on everything but "meta.C"
// (the usual SBEL meta-only search), the fold-level base-model work is
// computed once and shared across trials; the returned numbers are identical
// to the generic path.
SearchResult randomized_search(LearnerKind kind, const SearchSpace& space, int budget,
                               const Matrix& features, const std::vector<int>& target,
                               const FoldAssignment& folds, std::uint64_t seed);

std::string to_json(const SearchResult& result);

struct KindSearch {
  HyperParams params;
  double cv_auc = 0.0;
};

// One protocol-level search for `kind` over its default space. Base kinds run
// a single randomized_search; SBEL first tunes each base learner individually,
// then searches meta.C with the tuned bases held fixed (using `sbel_folds`
// inner stacking folds).
KindSearch search_kind_params(LearnerKind kind, int budget, const Matrix& features,
                              const std::vector<int>& target, const FoldAssignment& folds,
                              std::uint64_t seed, int sbel_folds = 5);

}  // namespace subsetforge
