#include "subsetforge/stacking.hpp"

#include <algorithm>
#include <string>

namespace subsetforge {

OofMetaFeatures compute_oof_meta_features(const std::map<LearnerKind, HyperParams>& base_params,
                                          const Matrix& features,
                                          const std::vector<int>& target,
                                          const FoldAssignment& folds, std::uint64_t seed) {
  const auto& bases = base_learner_kinds();
  std::size_t n = features.rows;
  if (folds.fold_of_row.size() != n || folds.k < 2)
    throw InvalidArgument("compute_oof_meta_features: bad fold assignment");
  for (LearnerKind kind : bases)
    if (base_params.find(kind) == base_params.end())
      throw InvalidArgument("compute_oof_meta_features: missing parameters for " +
                            kind_name(kind));

  std::vector<std::vector<int>> train_rows(folds.k), held_out(folds.k);
  for (std::size_t i = 0; i < n; ++i) {
    int f = folds.fold_of_row[i];
    if (f < 0 || f >= folds.k)
      throw InvalidArgument("compute_oof_meta_features: fold index out of range");
    held_out[f].push_back(static_cast<int>(i));
    for (int g = 0; g < folds.k; ++g)
      if (g != f) train_rows[g].push_back(static_cast<int>(i));
  }

  OofMetaFeatures out;
  out.values = Matrix(n, bases.size());
  out.audit.passed = true;

  std::vector<std::vector<int>> y_by_fold(folds.k);
  for (int f = 0; f < folds.k; ++f) {
    y_by_fold[f].reserve(train_rows[f].size());
    for (int r : train_rows[f]) y_by_fold[f].push_back(target[static_cast<std::size_t>(r)]);
  }

  for (std::size_t c = 0; c < bases.size(); ++c) {
    LearnerKind kind = bases[c];
    std::uint64_t base_stream = derive_seed(seed, "oof_" + kind_name(kind));
    std::vector<int> scorer(n, -1);
    for (int f = 0; f < folds.k; ++f) {
      Matrix x_fit = features.select_rows(train_rows[f]);
      TrainedModel model = fit(kind, base_params.at(kind), x_fit, y_by_fold[f],
                               derive_seed(base_stream, "fold", static_cast<std::uint64_t>(f)));
      Matrix x_out = features.select_rows(held_out[f]);
      std::vector<double> scores = predict_scores(model, x_out);
      for (std::size_t j = 0; j < held_out[f].size(); ++j) {
        std::size_t r = static_cast<std::size_t>(held_out[f][j]);
        if (scorer[r] != -1) out.audit.passed = false;  // double-scored
        scorer[r] = f;
        out.values.at(r, c) = scores[j];
      }
    }
    // Re-verify the bookkeeping from the recorded partitions instead of
    // trusting the loop above: each row scored exactly once, by the model
    // whose training slice provably excludes it.
    for (std::size_t r = 0; r < n; ++r) {
      bool ok = scorer[r] == folds.fold_of_row[r];
      if (ok) {
        const auto& tr = train_rows[static_cast<std::size_t>(scorer[r])];
        ok = !std::binary_search(tr.begin(), tr.end(), static_cast<int>(r));
      }
      if (!ok) out.audit.passed = false;
    }
  }
  out.audit.rows_checked = n;

  // Rescale the SVM margin column to [0,1]; its raw bounds are reported so
  // callers can apply the same map to later scores.
  auto svm_it = std::find(bases.begin(), bases.end(), LearnerKind::SVM);
  if (svm_it != bases.end()) {
    std::size_t c = static_cast<std::size_t>(svm_it - bases.begin());
    double lo = out.values.at(0, c), hi = lo;
    for (std::size_t r = 1; r < n; ++r) {
      lo = std::min(lo, out.values.at(r, c));
      hi = std::max(hi, out.values.at(r, c));
    }
    out.svm_lo = lo;
    out.svm_hi = hi;
    double span = hi - lo;
    for (std::size_t r = 0; r < n; ++r)
      out.values.at(r, c) = span > 0.0 ? (out.values.at(r, c) - lo) / span : 0.5;
  }
  return out;
}

}  // namespace subsetforge
