#include "subsetforge/tuning.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "subsetforge/metrics.hpp"
#include "subsetforge/stacking.hpp"

namespace subsetforge {

using nlohmann::json;

FoldAssignment stratified_kfold(const std::vector<int>& target, int k, std::uint64_t seed) {
  if (k < 2) throw InvalidArgument("stratified_kfold: k must be at least 2");
  FoldAssignment out;
  out.k = k;
  out.seed = seed;
  out.fold_of_row.assign(target.size(), -1);
  for (int cls = 0; cls <= 1; ++cls) {
    std::vector<int> idx;
    for (std::size_t i = 0; i < target.size(); ++i) {
      if (target[i] != 0 && target[i] != 1)
        throw InvalidArgument("stratified_kfold: target values must be 0 or 1");
      if (target[i] == cls) idx.push_back(static_cast<int>(i));
    }
    if (idx.size() < static_cast<std::size_t>(k))
      throw InvalidArgument("stratified_kfold: class " + std::to_string(cls) +
                            " has fewer members than folds");
    Rng rng(derive_seed(seed, "kfold_class", static_cast<std::uint64_t>(cls)));
    rng.shuffle(idx);
    for (std::size_t pos = 0; pos < idx.size(); ++pos)
      out.fold_of_row[static_cast<std::size_t>(idx[pos])] = static_cast<int>(pos) % k;
  }
  return out;
}

namespace {

struct FoldSlice {
  std::vector<int> train;
  std::vector<int> test;
  std::uint64_t content_key = 0;  // FNV over the held-out row indices
};

std::vector<FoldSlice> slice_folds(const FoldAssignment& folds, std::size_t n) {
  if (folds.fold_of_row.size() != n)
    throw InvalidArgument("cv_auc: fold assignment does not cover the rows");
  if (folds.k < 2) throw InvalidArgument("cv_auc: need at least 2 folds");
  std::vector<FoldSlice> slices(static_cast<std::size_t>(folds.k));
  for (std::size_t i = 0; i < n; ++i) {
    int f = folds.fold_of_row[i];
    if (f < 0 || f >= folds.k) throw InvalidArgument("cv_auc: fold index out of range");
    for (int g = 0; g < folds.k; ++g)
      (g == f ? slices[static_cast<std::size_t>(g)].test
              : slices[static_cast<std::size_t>(g)].train)
          .push_back(static_cast<int>(i));
  }
  for (FoldSlice& s : slices) {
    std::uint64_t key = 1469598103934665603ULL;
    for (int r : s.test) {
      key ^= static_cast<std::uint64_t>(r);
      key *= 1099511628211ULL;
    }
    s.content_key = key;
  }
  return slices;
}

bool single_class(const std::vector<int>& target, const std::vector<int>& rows) {
  if (rows.empty()) return true;
  int first = target[static_cast<std::size_t>(rows[0])];
  for (int r : rows)
    if (target[static_cast<std::size_t>(r)] != first) return false;
  return true;
}

// Empty string when the fold is usable; otherwise the skip reason.
std::string fold_skip_reason(const FoldSlice& slice, const std::vector<int>& target, int f) {
  if (slice.test.empty()) return "fold " + std::to_string(f) + " is empty; skipped";
  if (single_class(target, slice.train))
    return "fold " + std::to_string(f) + " leaves a single-class training set; skipped";
  if (single_class(target, slice.test))
    return "fold " + std::to_string(f) + " holds out a single class; skipped";
  return {};
}

std::vector<int> select_ints(const std::vector<int>& values, const std::vector<int>& rows) {
  std::vector<int> out;
  out.reserve(rows.size());
  for (int r : rows) out.push_back(values[static_cast<std::size_t>(r)]);
  return out;
}

// Mean with a summation order fixed by the values themselves, so relabeling
// folds cannot shift the result by a rounding term.
double label_invariant_mean(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

}  // namespace

CvResult cv_auc_detail(LearnerKind kind, const HyperParams& params, const Matrix& features,
                       const std::vector<int>& target, const FoldAssignment& folds,
                       std::uint64_t seed) {
  if (target.size() != features.rows) throw InvalidArgument("cv_auc: target size mismatch");
  std::vector<FoldSlice> slices = slice_folds(folds, features.rows);

  CvResult result;
  result.fold_aucs.assign(slices.size(), std::numeric_limits<double>::quiet_NaN());
  std::vector<double> kept;
  for (std::size_t f = 0; f < slices.size(); ++f) {
    std::string reason = fold_skip_reason(slices[f], target, static_cast<int>(f));
    if (!reason.empty()) {
      result.warnings.push_back("cv_auc: " + reason);
      continue;
    }
    TrainedModel model =
        fit(kind, params, features.select_rows(slices[f].train),
            select_ints(target, slices[f].train),
            derive_seed(seed, "cv_fit", slices[f].content_key));
    std::vector<double> scores =
        predict_scores(model, features.select_rows(slices[f].test));
    double auc = roc_auc(select_ints(target, slices[f].test), scores).auc;
    result.fold_aucs[f] = auc;
    kept.push_back(auc);
  }
  if (kept.empty()) throw Error("cv_auc: every fold was skipped");
  result.mean_auc = label_invariant_mean(std::move(kept));
  return result;
}

double cv_auc(LearnerKind kind, const HyperParams& params, const Matrix& features,
              const std::vector<int>& target, const FoldAssignment& folds,
              std::uint64_t seed) {
  return cv_auc_detail(kind, params, features, target, folds, seed).mean_auc;
}

// ---------------------------------------------------------------------------
// Search spaces
// ---------------------------------------------------------------------------

ParamDistribution ParamDistribution::uniform(double lo, double hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || lo > hi)
    throw InvalidArgument("uniform distribution: bad bounds");
  return {Kind::Uniform, lo, hi, {}};
}

ParamDistribution ParamDistribution::log_uniform(double lo, double hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || lo <= 0.0 || lo > hi)
    throw InvalidArgument("log_uniform distribution: bad bounds");
  return {Kind::LogUniform, lo, hi, {}};
}

ParamDistribution ParamDistribution::uniform_int(long long lo, long long hi) {
  if (lo > hi) throw InvalidArgument("uniform_int distribution: bad bounds");
  return {Kind::UniformInt, static_cast<double>(lo), static_cast<double>(hi), {}};
}

ParamDistribution ParamDistribution::categorical(std::vector<double> choices) {
  if (choices.empty()) throw InvalidArgument("categorical distribution: no choices");
  for (double v : choices)
    if (!std::isfinite(v)) throw InvalidArgument("categorical distribution: non-finite choice");
  return {Kind::Categorical, 0.0, 0.0, std::move(choices)};
}

bool ParamDistribution::single_point() const {
  if (kind == Kind::Categorical)
    return std::all_of(choices.begin(), choices.end(),
                       [&](double v) { return v == choices.front(); });
  return lo == hi;
}

double ParamDistribution::sample(Rng& rng) const {
  switch (kind) {
    case Kind::Uniform: return rng.uniform(lo, hi);
    case Kind::LogUniform: return rng.log_uniform(lo, hi);
    case Kind::UniformInt:
      return static_cast<double>(
          rng.uniform_int(static_cast<long long>(lo), static_cast<long long>(hi)));
    case Kind::Categorical:
      return choices[rng.categorical(std::vector<double>(choices.size(), 1.0))];
  }
  throw InvalidArgument("ParamDistribution: unknown kind");
}

HyperParams SearchSpace::sample(Rng& rng) const {
  HyperParams p;
  for (const auto& [key, dist] : dists) p.set(key, dist.sample(rng));
  return p;
}

SearchSpace default_search_space(LearnerKind kind) {
  using D = ParamDistribution;
  SearchSpace s;
  auto& d = s.dists;
  switch (kind) {
    case LearnerKind::LR:
      d.emplace("C", D::log_uniform(1e-3, 1e3));
      d.emplace("max_iter", D::point(100));
      d.emplace("tol", D::point(1e-8));
      break;
    case LearnerKind::SVM:
      d.emplace("C", D::log_uniform(1e-3, 1e3));
      d.emplace("epochs", D::uniform_int(50, 200));
      break;
    case LearnerKind::RF:
      d.emplace("trees", D::uniform_int(50, 400));
      d.emplace("max_depth", D::uniform_int(2, 16));
      d.emplace("min_leaf", D::uniform_int(1, 20));
      d.emplace("feature_fraction", D::uniform(0.3, 1.0));
      d.emplace("bootstrap", D::point(1));
      break;
    case LearnerKind::ANN:
      d.emplace("hidden", D::uniform_int(8, 128));
      d.emplace("learning_rate", D::log_uniform(1e-4, 1e-1));
      d.emplace("epochs", D::uniform_int(50, 300));
      d.emplace("l2", D::log_uniform(1e-6, 1e-2));
      break;
    case LearnerKind::GBT:
      d.emplace("rounds", D::uniform_int(50, 400));
      d.emplace("learning_rate", D::log_uniform(0.01, 0.3));
      d.emplace("max_depth", D::uniform_int(2, 8));
      d.emplace("subsample", D::uniform(0.5, 1.0));
      d.emplace("colsample", D::uniform(0.5, 1.0));
      d.emplace("lambda", D::log_uniform(1e-3, 10.0));
      break;
    case LearnerKind::SBEL:
      d.emplace("meta.C", D::log_uniform(1e-3, 1e3));
      d.emplace("folds", D::point(5));
      for (LearnerKind base : base_learner_kinds()) {
        std::string prefix = kind_name(base);
        std::transform(prefix.begin(), prefix.end(), prefix.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        HyperParams base_defaults = default_params(base);
        for (const auto& [key, value] : base_defaults.values())
          d.emplace(prefix + "." + key, D::point(value));
      }
      break;
  }
  return s;
}

// ---------------------------------------------------------------------------
// Randomized search
// ---------------------------------------------------------------------------

namespace {

// True when every sampled setting matches trial 0 on every key but "meta.C":
// the SBEL meta-only pattern where fold-level base work can be shared.
bool meta_only_variation(const std::vector<HyperParams>& settings) {
  for (std::size_t t = 1; t < settings.size(); ++t) {
    if (settings[t].values().size() != settings[0].values().size()) return false;
    for (const auto& [key, value] : settings[t].values()) {
      if (key == "meta.C") continue;
      if (!settings[0].has(key) || settings[0].get(key) != value) return false;
    }
  }
  return true;
}

// Shared-precompute evaluation of SBEL trials; every number produced is
// identical to evaluating cv_auc(SBEL, settings[t], ...) trial by trial,
// because the base fits depend only on (fold, base params, fit seed).
void evaluate_sbel_shared(const std::vector<HyperParams>& settings, const Matrix& features,
                          const std::vector<int>& target, const FoldAssignment& folds,
                          std::uint64_t seed, std::vector<TrialResult>& trials) {
  std::vector<FoldSlice> slices = slice_folds(folds, features.rows);
  std::map<LearnerKind, HyperParams> base_params = sbel_base_params(settings[0]);
  int k_inner = static_cast<int>(settings[0].get_or("folds", 5));

  std::vector<std::vector<double>> fold_aucs(settings.size());
  int kept = 0;
  std::string failure;
  try {
    for (std::size_t t = 0; t < settings.size(); ++t)
      validate_params(LearnerKind::SBEL, settings[t]);
    for (std::size_t f = 0; f < slices.size(); ++f) {
      if (!fold_skip_reason(slices[f], target, static_cast<int>(f)).empty()) continue;
      std::uint64_t fit_seed = derive_seed(seed, "cv_fit", slices[f].content_key);
      Matrix x_fit = features.select_rows(slices[f].train);
      std::vector<int> y_fit = select_ints(target, slices[f].train);
      StackedPrecompute pre =
          precompute_stacked(base_params, x_fit, y_fit, k_inner, fit_seed, {});
      Matrix x_out = features.select_rows(slices[f].test);
      std::vector<int> y_out = select_ints(target, slices[f].test);
      for (std::size_t t = 0; t < settings.size(); ++t) {
        HyperParams meta;
        meta.set("C", settings[t].get_or("meta.C", 1.0));
        TrainedModel model =
            assemble_stacked(pre, base_params, meta, y_fit, k_inner, fit_seed);
        fold_aucs[t].push_back(roc_auc(y_out, predict_scores(model, x_out)).auc);
      }
      ++kept;
    }
    if (kept == 0) throw Error("cv_auc: every fold was skipped");
  } catch (const std::exception& e) {
    failure = e.what();
  }

  for (std::size_t t = 0; t < settings.size(); ++t) {
    if (!failure.empty()) {
      trials[t].ok = false;
      trials[t].error = failure;
      continue;
    }
    trials[t].cv_auc = label_invariant_mean(fold_aucs[t]);
    trials[t].ok = true;
  }
}

}  // namespace

SearchResult randomized_search(LearnerKind kind, const SearchSpace& space, int budget,
                               const Matrix& features, const std::vector<int>& target,
                               const FoldAssignment& folds, std::uint64_t seed) {
  if (budget < 1) throw InvalidArgument("randomized_search: budget must be at least 1");
  if (space.dists.empty()) throw InvalidArgument("randomized_search: empty search space");

  Rng draw_rng(derive_seed(seed, "search_draws"));
  std::vector<HyperParams> settings;
  settings.reserve(static_cast<std::size_t>(budget));
  for (int t = 0; t < budget; ++t) settings.push_back(space.sample(draw_rng));

  SearchResult result;
  result.trials.resize(static_cast<std::size_t>(budget));
  for (int t = 0; t < budget; ++t) {
    result.trials[static_cast<std::size_t>(t)].index = t;
    result.trials[static_cast<std::size_t>(t)].params = settings[static_cast<std::size_t>(t)];
  }

  if (kind == LearnerKind::SBEL && budget > 1 && meta_only_variation(settings)) {
    evaluate_sbel_shared(settings, features, target, folds, seed, result.trials);
  } else {
    parallel_for(static_cast<std::size_t>(budget), [&](std::size_t t) {
      try {
        result.trials[t].cv_auc = cv_auc(kind, settings[t], features, target, folds, seed);
        result.trials[t].ok = true;
      } catch (const std::exception& e) {
        result.trials[t].ok = false;
        result.trials[t].error = e.what();
      }
    });
  }

  int best = -1;
  for (int t = 0; t < budget; ++t) {
    const TrialResult& trial = result.trials[static_cast<std::size_t>(t)];
    if (trial.ok && (best < 0 || trial.cv_auc > result.best_cv_auc)) {
      best = t;
      result.best_cv_auc = trial.cv_auc;
    }
  }
  if (best < 0) {
    std::string detail;
    for (const TrialResult& trial : result.trials) {
      if (detail.size() > 300) break;
      detail += "\n  trial " + std::to_string(trial.index) + ": " + trial.error;
    }
    throw Error("randomized_search: all trials failed" + detail);
  }
  result.best_params = result.trials[static_cast<std::size_t>(best)].params;
  return result;
}

KindSearch search_kind_params(LearnerKind kind, int budget, const Matrix& features,
                              const std::vector<int>& target, const FoldAssignment& folds,
                              std::uint64_t seed, int sbel_folds) {
  if (kind != LearnerKind::SBEL) {
    SearchResult r = randomized_search(kind, default_search_space(kind), budget, features,
                                       target, folds, seed);
    return {r.best_params, r.best_cv_auc};
  }

  SearchSpace space;
  space.dists.emplace("meta.C", ParamDistribution::log_uniform(1e-3, 1e3));
  space.dists.emplace("folds", ParamDistribution::point(sbel_folds));
  for (LearnerKind base : base_learner_kinds()) {
    SearchResult r =
        randomized_search(base, default_search_space(base), budget, features, target, folds,
                          derive_seed(seed, "sbel_base_" + kind_name(base)));
    std::string prefix = kind_name(base);
    std::transform(prefix.begin(), prefix.end(), prefix.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    for (const auto& [key, value] : r.best_params.values())
      space.dists.emplace(prefix + "." + key, ParamDistribution::point(value));
  }
  SearchResult r = randomized_search(LearnerKind::SBEL, space, budget, features, target,
                                     folds, derive_seed(seed, "sbel_meta"));
  return {r.best_params, r.best_cv_auc};
}

std::string to_json(const SearchResult& result) {
  json trials = json::array();
  for (const TrialResult& trial : result.trials) {
    json t{{"index", trial.index}, {"params", trial.params.values()}, {"ok", trial.ok}};
    if (trial.ok)
      t["cv_auc"] = trial.cv_auc;
    else
      t["error"] = trial.error;
    trials.push_back(std::move(t));
  }
  return json{{"format_version", 1},
              {"best_params", result.best_params.values()},
              {"best_cv_auc", result.best_cv_auc},
              {"trials", std::move(trials)}}
      .dump(2);
}

}  // namespace subsetforge
