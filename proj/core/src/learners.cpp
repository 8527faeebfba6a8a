#include "subsetforge/learners.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include <json.hpp>

#include "subsetforge/boosted_trees.hpp"
#include "subsetforge/folds.hpp"
#include "subsetforge/linear_svm.hpp"
#include "subsetforge/logistic.hpp"
#include "subsetforge/neural_net.hpp"
#include "subsetforge/random_forest.hpp"
#include "subsetforge/stacking.hpp"

namespace subsetforge {

using nlohmann::json;

const std::vector<LearnerKind>& all_learner_kinds() {
  static const std::vector<LearnerKind> kinds = {LearnerKind::LR,  LearnerKind::SVM,
                                                 LearnerKind::RF,  LearnerKind::ANN,
                                                 LearnerKind::GBT, LearnerKind::SBEL};
  return kinds;
}

const std::vector<LearnerKind>& base_learner_kinds() {
  static const std::vector<LearnerKind> kinds = {LearnerKind::LR, LearnerKind::SVM,
                                                 LearnerKind::RF, LearnerKind::ANN,
                                                 LearnerKind::GBT};
  return kinds;
}

std::string kind_name(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::LR: return "LR";
    case LearnerKind::SVM: return "SVM";
    case LearnerKind::RF: return "RF";
    case LearnerKind::ANN: return "ANN";
    case LearnerKind::GBT: return "GBT";
    case LearnerKind::SBEL: return "SBEL";
  }
  throw InvalidArgument("kind_name: unknown learner kind");
}

std::string kind_display_name(LearnerKind kind) {
  return kind == LearnerKind::GBT ? "XGBoost" : kind_name(kind);
}

LearnerKind kind_from_name(const std::string& name) {
  std::string lower = name;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "lr") return LearnerKind::LR;
  if (lower == "svm") return LearnerKind::SVM;
  if (lower == "rf") return LearnerKind::RF;
  if (lower == "ann") return LearnerKind::ANN;
  if (lower == "gbt" || lower == "xgboost") return LearnerKind::GBT;
  if (lower == "sbel") return LearnerKind::SBEL;
  throw InvalidArgument("unknown learner kind: " + name);
}

double HyperParams::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw InvalidArgument("missing hyperparameter: " + key);
  return it->second;
}

double HyperParams::get_or(const std::string& key, double fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

HyperParams HyperParams::with_prefix_stripped(const std::string& prefix) const {
  HyperParams out;
  for (const auto& [key, value] : values_)
    if (key.size() > prefix.size() && key.compare(0, prefix.size(), prefix) == 0)
      out.set(key.substr(prefix.size()), value);
  return out;
}

namespace {

std::string kind_prefix(LearnerKind kind) {
  std::string p = kind_name(kind);
  std::transform(p.begin(), p.end(), p.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return p + ".";
}

struct ParamBound {
  double lo;
  double hi;
  bool integer;
};

const std::map<std::string, ParamBound>& param_bounds(LearnerKind kind) {
  static const std::map<std::string, ParamBound> lr = {
      {"C", {1e-6, 1e6, false}}, {"max_iter", {1, 10000, true}}, {"tol", {0.0, 1.0, false}}};
  static const std::map<std::string, ParamBound> svm = {{"C", {1e-6, 1e6, false}},
                                                        {"epochs", {1, 10000, true}}};
  static const std::map<std::string, ParamBound> rf = {{"trees", {1, 5000, true}},
                                                       {"max_depth", {1, 64, true}},
                                                       {"min_leaf", {1, 10000, true}},
                                                       {"feature_fraction", {1e-6, 1.0, false}},
                                                       {"bootstrap", {0, 1, true}}};
  static const std::map<std::string, ParamBound> ann = {{"hidden", {1, 4096, true}},
                                                        {"learning_rate", {1e-8, 10.0, false}},
                                                        {"epochs", {1, 100000, true}},
                                                        {"l2", {0.0, 100.0, false}}};
  static const std::map<std::string, ParamBound> gbt = {{"rounds", {1, 5000, true}},
                                                        {"learning_rate", {1e-6, 1.0, false}},
                                                        {"max_depth", {1, 64, true}},
                                                        {"subsample", {1e-6, 1.0, false}},
                                                        {"colsample", {1e-6, 1.0, false}},
                                                        {"lambda", {0.0, 1e6, false}}};
  static const std::map<std::string, ParamBound> sbel = {{"meta.C", {1e-6, 1e6, false}},
                                                         {"folds", {2, 50, true}}};
  switch (kind) {
    case LearnerKind::LR: return lr;
    case LearnerKind::SVM: return svm;
    case LearnerKind::RF: return rf;
    case LearnerKind::ANN: return ann;
    case LearnerKind::GBT: return gbt;
    case LearnerKind::SBEL: return sbel;
  }
  throw InvalidArgument("param_bounds: unknown learner kind");
}

void check_bound(const std::string& key, double value, const ParamBound& bound) {
  if (!std::isfinite(value))
    throw InvalidArgument("hyperparameter " + key + " must be finite");
  if (value < bound.lo || value > bound.hi)
    throw InvalidArgument("hyperparameter " + key + " out of range");
  if (bound.integer && value != std::floor(value))
    throw InvalidArgument("hyperparameter " + key + " must be an integer");
}

}  // namespace

HyperParams default_params(LearnerKind kind) {
  HyperParams p;
  switch (kind) {
    case LearnerKind::LR:
      p.set("C", 1.0);
      p.set("max_iter", 100);
      p.set("tol", 1e-8);
      break;
    case LearnerKind::SVM:
      p.set("C", 1.0);
      p.set("epochs", 100);
      break;
    case LearnerKind::RF:
      p.set("trees", 100);
      p.set("max_depth", 10);
      p.set("min_leaf", 5);
      p.set("feature_fraction", 0.6);
      p.set("bootstrap", 1);
      break;
    case LearnerKind::ANN:
      p.set("hidden", 32);
      p.set("learning_rate", 0.01);
      p.set("epochs", 150);
      p.set("l2", 1e-4);
      break;
    case LearnerKind::GBT:
      p.set("rounds", 150);
      p.set("learning_rate", 0.1);
      p.set("max_depth", 3);
      p.set("subsample", 1.0);
      p.set("colsample", 1.0);
      p.set("lambda", 1.0);
      break;
    case LearnerKind::SBEL:
      p.set("meta.C", 1.0);
      p.set("folds", 5);
      for (LearnerKind base : base_learner_kinds()) {
        std::string prefix = kind_prefix(base);
        HyperParams base_defaults = default_params(base);
        for (const auto& [key, value] : base_defaults.values()) p.set(prefix + key, value);
      }
      break;
  }
  return p;
}

void validate_params(LearnerKind kind, const HyperParams& params) {
  const auto& bounds = param_bounds(kind);
  for (const auto& [key, value] : params.values()) {
    auto it = bounds.find(key);
    if (it != bounds.end()) {
      check_bound(key, value, it->second);
      continue;
    }
    if (kind == LearnerKind::SBEL) {
      auto dot = key.find('.');
      if (dot != std::string::npos) {
        std::string head = key.substr(0, dot + 1), tail = key.substr(dot + 1);
        bool matched = false;
        for (LearnerKind base : base_learner_kinds()) {
          if (head != kind_prefix(base)) continue;
          const auto& base_bounds = param_bounds(base);
          auto jt = base_bounds.find(tail);
          if (jt == base_bounds.end())
            throw InvalidArgument("unknown hyperparameter for " + kind_name(base) + ": " + tail);
          check_bound(key, value, jt->second);
          matched = true;
          break;
        }
        if (matched) continue;
      }
    }
    throw InvalidArgument("unknown hyperparameter for " + kind_name(kind) + ": " + key);
  }
}

namespace {

void check_training_inputs(const Matrix& features, const std::vector<int>& target) {
  if (features.rows == 0) throw InvalidArgument("fit: empty training set");
  if (target.size() != features.rows) throw InvalidArgument("fit: target size mismatch");
  std::size_t pos = 0;
  for (int v : target) {
    if (v != 0 && v != 1) throw InvalidArgument("fit: target values must be 0 or 1");
    pos += static_cast<std::size_t>(v);
  }
  if (pos == 0 || pos == target.size()) throw InvalidArgument("fit: single-class target");
  for (double v : features.data)
    if (!std::isfinite(v)) throw InvalidArgument("fit: non-finite feature value");
}

std::vector<std::string> resolve_names(std::vector<std::string> names, std::size_t cols) {
  if (names.empty()) {
    names.reserve(cols);
    for (std::size_t j = 0; j < cols; ++j) names.push_back("f" + std::to_string(j));
  } else if (names.size() != cols) {
    throw InvalidArgument("fit: feature name count mismatch");
  }
  return names;
}

std::vector<double> stacked_meta_scores(const StackedModel& model, const Matrix& features) {
  const auto& bases = base_learner_kinds();
  Matrix meta_x(features.rows, bases.size());
  for (std::size_t c = 0; c < bases.size(); ++c) {
    std::vector<double> scores = predict_scores(model.bases[c], features);
    if (bases[c] == LearnerKind::SVM) {
      double span = model.svm_hi - model.svm_lo;
      for (double& s : scores)
        s = span > 0.0 ? std::clamp((s - model.svm_lo) / span, 0.0, 1.0) : 0.5;
    }
    for (std::size_t r = 0; r < features.rows; ++r) meta_x.at(r, c) = scores[r];
  }
  return logistic_scores(model.meta, meta_x);
}

}  // namespace

TrainedModel fit(LearnerKind kind, const HyperParams& params, const Matrix& features,
                 const std::vector<int>& target, std::uint64_t seed,
                 std::vector<std::string> feature_names) {
  validate_params(kind, params);

  if (kind == LearnerKind::SBEL) {
    std::map<LearnerKind, HyperParams> base_params = sbel_base_params(params);
    HyperParams meta;
    meta.set("C", params.get_or("meta.C", 1.0));
    int k = static_cast<int>(params.get_or("folds", 5));
    TrainedModel model = fit_stacked(base_params, meta, features, target, k, seed,
                                     std::move(feature_names));
    model.params = params;
    return model;
  }

  check_training_inputs(features, target);

  TrainedModel model;
  model.kind = kind;
  model.params = params;
  model.feature_names = resolve_names(std::move(feature_names), features.cols);
  model.train_seed = seed;

  switch (kind) {
    case LearnerKind::LR:
      model.logistic = std::make_shared<LogisticModel>(
          fit_logistic(features, target, params.get_or("C", 1.0),
                       static_cast<int>(params.get_or("max_iter", 100)),
                       params.get_or("tol", 1e-8)));
      break;
    case LearnerKind::SVM:
      model.svm = std::make_shared<LinearSvmModel>(
          fit_linear_svm(features, target, params.get_or("C", 1.0),
                         static_cast<int>(params.get_or("epochs", 100)), seed));
      break;
    case LearnerKind::RF: {
      ForestParams fp;
      fp.trees = static_cast<int>(params.get_or("trees", 100));
      fp.max_depth = static_cast<int>(params.get_or("max_depth", 10));
      fp.min_leaf = static_cast<int>(params.get_or("min_leaf", 5));
      fp.feature_fraction = params.get_or("feature_fraction", 0.6);
      fp.bootstrap = params.get_or("bootstrap", 1) != 0.0;
      model.forest =
          std::make_shared<ForestModel>(fit_random_forest(features, target, fp, seed));
      break;
    }
    case LearnerKind::ANN: {
      NeuralNetParams np;
      np.hidden = static_cast<int>(params.get_or("hidden", 32));
      np.learning_rate = params.get_or("learning_rate", 0.01);
      np.epochs = static_cast<int>(params.get_or("epochs", 150));
      np.l2 = params.get_or("l2", 1e-4);
      model.net = std::make_shared<NeuralNetModel>(fit_neural_net(features, target, np, seed));
      break;
    }
    case LearnerKind::GBT: {
      BoostedTreesParams bp;
      bp.rounds = static_cast<int>(params.get_or("rounds", 150));
      bp.learning_rate = params.get_or("learning_rate", 0.1);
      bp.max_depth = static_cast<int>(params.get_or("max_depth", 3));
      bp.subsample = params.get_or("subsample", 1.0);
      bp.colsample = params.get_or("colsample", 1.0);
      bp.lambda = params.get_or("lambda", 1.0);
      model.boosted =
          std::make_shared<BoostedTreesModel>(fit_boosted_trees(features, target, bp, seed));
      break;
    }
    case LearnerKind::SBEL:
      break;  // handled above
  }
  return model;
}

std::vector<double> predict_scores(const TrainedModel& model, const Matrix& features) {
  if (features.cols != model.feature_names.size())
    throw InvalidArgument("predict_scores: feature count mismatch");
  switch (model.kind) {
    case LearnerKind::LR: return logistic_scores(*model.logistic, features);
    case LearnerKind::SVM: return svm_margins(*model.svm, features);
    case LearnerKind::RF: return forest_scores(*model.forest, features);
    case LearnerKind::ANN: return neural_net_scores(*model.net, features);
    case LearnerKind::GBT: return boosted_scores(*model.boosted, features);
    case LearnerKind::SBEL: return stacked_meta_scores(*model.stacked, features);
  }
  throw InvalidArgument("predict_scores: unknown learner kind");
}

std::vector<int> predict_labels(const TrainedModel& model, const Matrix& features,
                                double threshold) {
  std::vector<double> scores = predict_scores(model, features);
  std::vector<int> labels(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) labels[i] = scores[i] >= threshold ? 1 : 0;
  return labels;
}

std::vector<int> predict_labels(const TrainedModel& model, const Matrix& features) {
  return predict_labels(model, features, default_threshold(model.kind));
}

double default_threshold(LearnerKind kind) {
  return kind == LearnerKind::SVM ? 0.0 : 0.5;
}

StackedPrecompute precompute_stacked(const std::map<LearnerKind, HyperParams>& base_params,
                                     const Matrix& features, const std::vector<int>& target,
                                     int k, std::uint64_t seed,
                                     std::vector<std::string> feature_names) {
  const auto& bases = base_learner_kinds();
  if (base_params.size() != bases.size())
    throw InvalidArgument("fit_stacked: expected parameters for exactly the base learners");
  for (LearnerKind base : bases) {
    auto it = base_params.find(base);
    if (it == base_params.end())
      throw InvalidArgument("fit_stacked: missing parameters for " + kind_name(base));
    validate_params(base, it->second);
  }
  if (k < 2) throw InvalidArgument("fit_stacked: need at least 2 folds");
  check_training_inputs(features, target);

  StackedPrecompute pre;
  pre.feature_names = resolve_names(std::move(feature_names), features.cols);

  FoldAssignment folds = stratified_kfold(target, k, derive_seed(seed, "stack_folds"));
  OofMetaFeatures oof = compute_oof_meta_features(base_params, features, target, folds, seed);
  if (!oof.audit.passed) throw Error("fit_stacked: out-of-fold audit failed");
  pre.oof_values = std::move(oof.values);
  pre.audit = oof.audit;

  for (LearnerKind base : bases)
    pre.bases.push_back(fit(base, base_params.at(base), features, target,
                            derive_seed(seed, "refit_" + kind_name(base)), pre.feature_names));

  // Bounds for mapping later SVM margins onto the meta scale come from the
  // refit model's margins over the training data.
  for (std::size_t c = 0; c < bases.size(); ++c) {
    if (bases[c] != LearnerKind::SVM) continue;
    std::vector<double> margins = predict_scores(pre.bases[c], features);
    auto [lo, hi] = std::minmax_element(margins.begin(), margins.end());
    pre.svm_lo = *lo;
    pre.svm_hi = *hi;
  }
  return pre;
}

TrainedModel assemble_stacked(const StackedPrecompute& pre,
                              const std::map<LearnerKind, HyperParams>& base_params,
                              const HyperParams& meta_params, const std::vector<int>& target,
                              int k, std::uint64_t seed) {
  validate_params(LearnerKind::LR, meta_params);

  auto stacked = std::make_shared<StackedModel>();
  stacked->audit = pre.audit;
  stacked->meta = fit_logistic(pre.oof_values, target, meta_params.get_or("C", 1.0),
                               static_cast<int>(meta_params.get_or("max_iter", 100)),
                               meta_params.get_or("tol", 1e-8));
  stacked->bases = pre.bases;
  stacked->svm_lo = pre.svm_lo;
  stacked->svm_hi = pre.svm_hi;

  TrainedModel model;
  model.kind = LearnerKind::SBEL;
  model.params.set("meta.C", meta_params.get_or("C", 1.0));
  model.params.set("folds", k);
  for (LearnerKind base : base_learner_kinds()) {
    std::string prefix = kind_prefix(base);
    for (const auto& [key, value] : base_params.at(base).values())
      model.params.set(prefix + key, value);
  }
  model.feature_names = pre.feature_names;
  model.train_seed = seed;
  model.stacked = std::move(stacked);
  return model;
}

TrainedModel fit_stacked(const std::map<LearnerKind, HyperParams>& base_params,
                         const HyperParams& meta_params, const Matrix& features,
                         const std::vector<int>& target, int k, std::uint64_t seed,
                         std::vector<std::string> feature_names) {
  validate_params(LearnerKind::LR, meta_params);
  StackedPrecompute pre =
      precompute_stacked(base_params, features, target, k, seed, std::move(feature_names));
  return assemble_stacked(pre, base_params, meta_params, target, k, seed);
}

std::map<LearnerKind, HyperParams> sbel_base_params(const HyperParams& params) {
  std::map<LearnerKind, HyperParams> out;
  for (LearnerKind base : base_learner_kinds()) {
    HyperParams p = default_params(base);
    HyperParams overrides = params.with_prefix_stripped(kind_prefix(base));
    for (const auto& [key, value] : overrides.values()) p.set(key, value);
    out[base] = p;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace {

json tree_to_json(const DecisionTree& tree) {
  json nodes = json::array();
  for (const TreeNode& n : tree.nodes)
    nodes.push_back({{"feature", n.feature},
                     {"threshold", n.threshold},
                     {"left", n.left},
                     {"right", n.right},
                     {"value", n.value}});
  return json{{"nodes", std::move(nodes)}};
}

DecisionTree tree_from_json(const json& j) {
  DecisionTree tree;
  for (const json& n : j.at("nodes")) {
    TreeNode node;
    node.feature = n.at("feature").get<int>();
    node.threshold = n.at("threshold").get<double>();
    node.left = n.at("left").get<int>();
    node.right = n.at("right").get<int>();
    node.value = n.at("value").get<double>();
    tree.nodes.push_back(node);
  }
  return tree;
}

json model_to_json_obj(const TrainedModel& model);

json payload_to_json(const TrainedModel& model) {
  switch (model.kind) {
    case LearnerKind::LR:
      return json{{"weights", model.logistic->weights}, {"intercept", model.logistic->intercept}};
    case LearnerKind::SVM:
      return json{{"weights", model.svm->weights}, {"bias", model.svm->bias}};
    case LearnerKind::RF: {
      json trees = json::array();
      for (const DecisionTree& t : model.forest->trees) trees.push_back(tree_to_json(t));
      return json{{"trees", std::move(trees)}};
    }
    case LearnerKind::ANN:
      return json{{"inputs", model.net->inputs}, {"hidden", model.net->hidden},
                  {"w1", model.net->w1},         {"b1", model.net->b1},
                  {"w2", model.net->w2},         {"b2", model.net->b2}};
    case LearnerKind::GBT: {
      json trees = json::array();
      for (const DecisionTree& t : model.boosted->trees) trees.push_back(tree_to_json(t));
      return json{{"base_score", model.boosted->base_score},
                  {"trees", std::move(trees)},
                  {"train_loss", model.boosted->train_loss}};
    }
    case LearnerKind::SBEL: {
      json bases = json::array();
      for (const TrainedModel& base : model.stacked->bases)
        bases.push_back(model_to_json_obj(base));
      return json{{"bases", std::move(bases)},
                  {"meta",
                   {{"weights", model.stacked->meta.weights},
                    {"intercept", model.stacked->meta.intercept}}},
                  {"svm_lo", model.stacked->svm_lo},
                  {"svm_hi", model.stacked->svm_hi},
                  {"audit",
                   {{"passed", model.stacked->audit.passed},
                    {"rows_checked", model.stacked->audit.rows_checked}}}};
    }
  }
  throw InvalidArgument("to_json: unknown learner kind");
}

json model_to_json_obj(const TrainedModel& model) {
  return json{{"format_version", 1},
              {"kind", kind_name(model.kind)},
              {"params", model.params.values()},
              {"feature_names", model.feature_names},
              {"train_seed", model.train_seed},
              {"model", payload_to_json(model)}};
}

TrainedModel model_from_json_obj(const json& j) {
  if (j.at("format_version").get<int>() != 1)
    throw ParseError("trained model: unsupported format_version");
  TrainedModel model;
  model.kind = kind_from_name(j.at("kind").get<std::string>());
  for (const auto& [key, value] : j.at("params").items())
    model.params.set(key, value.get<double>());
  model.feature_names = j.at("feature_names").get<std::vector<std::string>>();
  model.train_seed = j.at("train_seed").get<std::uint64_t>();

  const json& p = j.at("model");
  switch (model.kind) {
    case LearnerKind::LR: {
      LogisticModel m;
      m.weights = p.at("weights").get<std::vector<double>>();
      m.intercept = p.at("intercept").get<double>();
      model.logistic = std::make_shared<LogisticModel>(std::move(m));
      break;
    }
    case LearnerKind::SVM: {
      LinearSvmModel m;
      m.weights = p.at("weights").get<std::vector<double>>();
      m.bias = p.at("bias").get<double>();
      model.svm = std::make_shared<LinearSvmModel>(std::move(m));
      break;
    }
    case LearnerKind::RF: {
      ForestModel m;
      for (const json& t : p.at("trees")) m.trees.push_back(tree_from_json(t));
      model.forest = std::make_shared<ForestModel>(std::move(m));
      break;
    }
    case LearnerKind::ANN: {
      NeuralNetModel m;
      m.inputs = p.at("inputs").get<std::size_t>();
      m.hidden = p.at("hidden").get<std::size_t>();
      m.w1 = p.at("w1").get<std::vector<double>>();
      m.b1 = p.at("b1").get<std::vector<double>>();
      m.w2 = p.at("w2").get<std::vector<double>>();
      m.b2 = p.at("b2").get<double>();
      model.net = std::make_shared<NeuralNetModel>(std::move(m));
      break;
    }
    case LearnerKind::GBT: {
      BoostedTreesModel m;
      m.base_score = p.at("base_score").get<double>();
      for (const json& t : p.at("trees")) m.trees.push_back(tree_from_json(t));
      m.train_loss = p.at("train_loss").get<std::vector<double>>();
      model.boosted = std::make_shared<BoostedTreesModel>(std::move(m));
      break;
    }
    case LearnerKind::SBEL: {
      auto m = std::make_shared<StackedModel>();
      for (const json& b : p.at("bases")) m->bases.push_back(model_from_json_obj(b));
      m->meta.weights = p.at("meta").at("weights").get<std::vector<double>>();
      m->meta.intercept = p.at("meta").at("intercept").get<double>();
      m->svm_lo = p.at("svm_lo").get<double>();
      m->svm_hi = p.at("svm_hi").get<double>();
      m->audit.passed = p.at("audit").at("passed").get<bool>();
      m->audit.rows_checked = p.at("audit").at("rows_checked").get<std::size_t>();
      model.stacked = std::move(m);
      break;
    }
  }
  return model;
}

}  // namespace

std::string to_json(const TrainedModel& model) { return model_to_json_obj(model).dump(2); }

TrainedModel trained_model_from_json(const std::string& text) {
  try {
    return model_from_json_obj(json::parse(text));
  } catch (const json::exception& e) {
    throw ParseError(std::string("trained model: ") + e.what());
  }
}

}  // namespace subsetforge
