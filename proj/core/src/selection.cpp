#include "subsetforge/selection.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "subsetforge/tuning.hpp"

namespace subsetforge {

using nlohmann::json;

RankedFeatures rank_features(const Dataset& dataset, RankOrder order) {
  if (dataset.n_rows() == 0) throw InvalidArgument("rank_features: empty dataset");
  bool target_constant = true;
  for (int v : dataset.target)
    if (v != dataset.target.front()) {
      target_constant = false;
      break;
    }
  if (target_constant) throw InvalidArgument("rank_features: target is constant");

  std::vector<double> target(dataset.target.begin(), dataset.target.end());
  struct Entry {
    std::string name;
    double rho = 0.0;
    bool constant = false;
    std::size_t schema_pos = 0;
  };
  RankedFeatures out;
  std::vector<Entry> entries;
  const auto& cols = dataset.schema.columns;
  for (std::size_t j = 0; j < cols.size(); ++j) {
    Entry e{cols[j].name, 0.0, false, j};
    try {
      e.rho = spearman(dataset.features.column(j), target);
    } catch (const InvalidArgument&) {
      e.constant = true;
      out.warnings.push_back("rank_features: '" + cols[j].name +
                             "' is constant; ranked last with rho 0");
    }
    entries.push_back(std::move(e));
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    double ka = a.constant ? -1.0 : std::fabs(a.rho);
    double kb = b.constant ? -1.0 : std::fabs(b.rho);
    if (ka != kb) return ka > kb;
    return a.schema_pos < b.schema_pos;
  });
  for (const Entry& e : entries) out.order.push_back({e.name, e.rho});
  if (order == RankOrder::Ascending) std::reverse(out.order.begin(), out.order.end());
  out.direction = order;
  return out;
}

namespace {

struct RankedColumn {
  int col = 0;
  std::string name;
};

// Candidate walk and tie-break order: |Spearman| rank, then schema order.
std::vector<RankedColumn> ranked_columns(const Dataset& train) {
  RankedFeatures ranked = rank_features(train, RankOrder::Descending);
  std::vector<RankedColumn> out;
  out.reserve(ranked.order.size());
  for (const RankedFeature& f : ranked.order)
    out.push_back({train.schema.index_of(f.name), f.name});
  return out;
}

// cv-AUC of a candidate subset, canonicalized to schema column order so the
// value does not depend on the path that produced the subset.
double subset_cv(LearnerKind kind, const HyperParams& params, const Dataset& train,
                 std::vector<int> cols, const FoldAssignment& folds, std::uint64_t seed) {
  std::sort(cols.begin(), cols.end());
  return cv_auc(kind, params, train.features.select_columns(cols), train.target, folds, seed);
}

std::vector<std::string> schema_order_names(const Dataset& train, std::vector<int> cols) {
  std::sort(cols.begin(), cols.end());
  std::vector<std::string> names;
  names.reserve(cols.size());
  for (int c : cols) names.push_back(train.schema.columns[static_cast<std::size_t>(c)].name);
  return names;
}

std::pair<FeatureSubset, SelectionTrace> forward_engine(LearnerKind kind, const Dataset& train,
                                                        double tolerance, bool use_tolerance,
                                                        std::size_t target_size,
                                                        const FoldAssignment& folds,
                                                        const HyperParams& params,
                                                        std::uint64_t seed) {
  std::vector<RankedColumn> remaining = ranked_columns(train);
  FeatureSubset subset;
  SelectionTrace trace;
  std::vector<int> current;
  double current_auc = 0.5;  // baseline: the uninformed classifier
  int step = 0;
  while (!remaining.empty() && current.size() < target_size) {
    ++step;
    std::vector<double> aucs(remaining.size());
    parallel_for(remaining.size(), [&](std::size_t i) {
      std::vector<int> cols = current;
      cols.push_back(remaining[i].col);
      aucs[i] = subset_cv(kind, params, train, std::move(cols), folds, seed);
    });
    std::size_t best = 0;
    for (std::size_t i = 1; i < aucs.size(); ++i)
      if (aucs[i] > aucs[best]) best = i;

    SelectionStep record;
    record.step = step;
    record.candidates_evaluated = static_cast<int>(remaining.size());
    record.feature = remaining[best].name;
    record.added = true;
    record.auc_before = current_auc;
    record.auc_after = aucs[best];
    record.delta = aucs[best] - current_auc;
    if (use_tolerance && !(record.delta > tolerance)) {
      record.accepted = false;
      trace.steps.push_back(std::move(record));
      break;
    }
    record.accepted = true;
    trace.steps.push_back(std::move(record));
    subset.names.push_back(remaining[best].name);
    current.push_back(remaining[best].col);
    current_auc = aucs[best];
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best));
  }
  return {std::move(subset), std::move(trace)};
}

}  // namespace

std::pair<FeatureSubset, SelectionTrace> forward_select(LearnerKind kind, const Dataset& train,
                                                        double tolerance,
                                                        const FoldAssignment& folds,
                                                        const HyperParams& params,
                                                        std::uint64_t seed) {
  if (!(tolerance > 0.0)) throw InvalidArgument("forward_select: tolerance must be positive");
  auto result = forward_engine(kind, train, tolerance, true,
                               train.schema.columns.size(), folds, params, seed);
  result.first.method = "forward";
  result.first.tolerance = tolerance;
  return result;
}

std::pair<FeatureSubset, SelectionTrace> forward_select_k(LearnerKind kind,
                                                          const Dataset& train, int k,
                                                          const FoldAssignment& folds,
                                                          const HyperParams& params,
                                                          std::uint64_t seed) {
  if (k < 1 || static_cast<std::size_t>(k) > train.schema.columns.size())
    throw InvalidArgument("forward_select_k: k out of range");
  auto result = forward_engine(kind, train, 0.0, false, static_cast<std::size_t>(k), folds,
                               params, seed);
  result.first.method = "fixed";
  result.first.k = k;
  return result;
}

std::pair<FeatureSubset, SelectionTrace> backward_eliminate(LearnerKind kind,
                                                            const Dataset& train,
                                                            double tolerance,
                                                            const FoldAssignment& folds,
                                                            const HyperParams& params,
                                                            std::uint64_t seed) {
  if (!(tolerance < 0.0)) throw InvalidArgument("backward_eliminate: tolerance must be negative");

  std::vector<RankedColumn> current = ranked_columns(train);
  SelectionTrace trace;
  std::vector<int> all_cols;
  for (const RankedColumn& c : current) all_cols.push_back(c.col);
  double current_auc = subset_cv(kind, params, train, all_cols, folds, seed);

  int step = 0;
  while (current.size() > 1) {
    ++step;
    std::vector<double> aucs(current.size());
    parallel_for(current.size(), [&](std::size_t i) {
      std::vector<int> cols;
      cols.reserve(current.size() - 1);
      for (std::size_t j = 0; j < current.size(); ++j)
        if (j != i) cols.push_back(current[j].col);
      aucs[i] = subset_cv(kind, params, train, std::move(cols), folds, seed);
    });
    std::size_t best = 0;
    for (std::size_t i = 1; i < aucs.size(); ++i)
      if (aucs[i] > aucs[best]) best = i;

    SelectionStep record;
    record.step = step;
    record.candidates_evaluated = static_cast<int>(current.size());
    record.feature = current[best].name;
    record.added = false;
    record.auc_before = current_auc;
    record.auc_after = aucs[best];
    record.delta = aucs[best] - current_auc;
    if (record.delta >= tolerance) {
      record.accepted = true;
      trace.steps.push_back(std::move(record));
      current.erase(current.begin() + static_cast<std::ptrdiff_t>(best));
      current_auc = aucs[best];
    } else {
      record.accepted = false;
      trace.steps.push_back(std::move(record));
      break;
    }
  }

  FeatureSubset subset;
  std::vector<int> cols;
  for (const RankedColumn& c : current) cols.push_back(c.col);
  subset.names = schema_order_names(train, std::move(cols));
  subset.method = "backward";
  subset.tolerance = tolerance;
  return {std::move(subset), std::move(trace)};
}

std::vector<SweepRow> filter_sweep_sizes(const SplitPair& split, const RankedFeatures& ranked,
                                         const std::vector<LearnerKind>& kinds,
                                         const std::vector<int>& sizes,
                                         const SweepConfig& config, std::uint64_t seed) {
  const Dataset& train = split.train;
  const Dataset& test = split.test;
  std::size_t total = train.schema.columns.size();
  if (ranked.order.size() != total)
    throw InvalidArgument("filter_sweep: ranking does not cover every predictor");
  if (kinds.empty()) throw InvalidArgument("filter_sweep: no learner kinds");
  for (std::size_t i = 0; i < kinds.size(); ++i)
    for (std::size_t j = i + 1; j < kinds.size(); ++j)
      if (kinds[i] == kinds[j])
        throw InvalidArgument("filter_sweep: duplicate kind " + kind_name(kinds[i]));
  if (config.budget < 1) throw InvalidArgument("filter_sweep: budget must be at least 1");

  std::vector<SweepRow> rows;
  rows.reserve(sizes.size());
  for (int s : sizes) {
    if (s < 1 || static_cast<std::size_t>(s) > total)
      throw InvalidArgument("filter_sweep: prefix size out of range");
    std::vector<int> cols;
    for (int i = 0; i < s; ++i) {
      int c = train.schema.index_of(ranked.order[static_cast<std::size_t>(i)].name);
      if (c < 0)
        throw InvalidArgument("filter_sweep: unknown feature '" +
                              ranked.order[static_cast<std::size_t>(i)].name + "'");
      cols.push_back(c);
    }
    std::sort(cols.begin(), cols.end());
    std::vector<std::string> names;
    for (int c : cols) names.push_back(train.schema.columns[static_cast<std::size_t>(c)].name);
    Matrix x_train = train.features.select_columns(cols);
    Matrix x_test = test.features.select_columns(cols);
    std::uint64_t size_idx = static_cast<std::uint64_t>(s);
    FoldAssignment folds = stratified_kfold(train.target, config.cv_folds,
                                            derive_seed(seed, "sweep_folds", size_idx));

    SweepRow row;
    row.feature_count = s;
    double sum_acc = 0, sum_rec = 0, sum_f1 = 0, sum_auc = 0, sum_far = 0;
    for (LearnerKind kind : kinds) {
      SearchSpace space = default_search_space(kind);
      if (kind == LearnerKind::SBEL)
        space.dists["folds"] = ParamDistribution::point(config.sbel_folds);
      SearchResult search = randomized_search(
          kind, space, config.budget, x_train, train.target, folds,
          derive_seed(seed, "sweep_search_" + kind_name(kind), size_idx));
      TrainedModel model =
          fit(kind, search.best_params, x_train, train.target,
              derive_seed(seed, "sweep_refit_" + kind_name(kind), size_idx), names);
      MetricsBundle m = evaluate_scores(test.target, predict_scores(model, x_test),
                                        default_threshold(kind));
      row.per_model.emplace_back(kind, m);
      sum_acc += m.accuracy;
      sum_rec += m.recall;
      sum_f1 += m.f1;
      sum_auc += *m.auc;
      sum_far += m.far;
    }
    double count = static_cast<double>(kinds.size());
    row.avg_accuracy = sum_acc / count;
    row.avg_recall = sum_rec / count;
    row.avg_f1 = sum_f1 / count;
    row.avg_auc = sum_auc / count;
    row.avg_far = sum_far / count;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<SweepRow> filter_sweep(const SplitPair& split, const RankedFeatures& ranked,
                                   const std::vector<LearnerKind>& kinds,
                                   const SweepConfig& config, std::uint64_t seed) {
  std::vector<int> sizes;
  for (std::size_t s = 1; s <= split.train.schema.columns.size(); ++s)
    sizes.push_back(static_cast<int>(s));
  return filter_sweep_sizes(split, ranked, kinds, sizes, config, seed);
}

WrapperMethod WrapperMethod::forward(double tolerance) {
  WrapperMethod m;
  m.kind = Kind::Forward;
  m.tolerance = tolerance;
  return m;
}

WrapperMethod WrapperMethod::backward(double tolerance) {
  WrapperMethod m;
  m.kind = Kind::Backward;
  m.tolerance = tolerance;
  return m;
}

WrapperMethod WrapperMethod::fixed_k(int k) {
  WrapperMethod m;
  m.kind = Kind::FixedK;
  m.k = k;
  return m;
}

std::string WrapperMethod::name() const {
  switch (kind) {
    case Kind::Forward: return "forward";
    case Kind::Backward: return "backward";
    case Kind::FixedK: return "fixed";
  }
  throw InvalidArgument("WrapperMethod: unknown kind");
}

double WrapperMethod::tolerance_or_k() const {
  return kind == Kind::FixedK ? static_cast<double>(k) : tolerance;
}

ProtocolReport run_wrapper_protocol(LearnerKind kind, const SplitPair& split,
                                    const WrapperMethod& method, const ProtocolConfig& config,
                                    std::uint64_t seed) {
  if (config.budget < 1)
    throw InvalidArgument("run_wrapper_protocol: budget must be at least 1");

  const Dataset& train = split.train;
  const Dataset& test = split.test;

  ProtocolReport report;
  report.kind = kind;
  report.method = method;

  FoldAssignment folds = stratified_kfold(train.target, config.cv_folds,
                                          derive_seed(seed, "protocol_folds"));
  KindSearch pre = search_kind_params(kind, config.budget, train.features, train.target,
                                      folds, derive_seed(seed, "params_pre"),
                                      config.sbel_folds);
  report.params_pre = pre.params;
  report.cv_auc_pre = pre.cv_auc;

  std::uint64_t select_seed = derive_seed(seed, "select");
  std::pair<FeatureSubset, SelectionTrace> selected;
  switch (method.kind) {
    case WrapperMethod::Kind::Forward:
      selected = forward_select(kind, train, method.tolerance, folds, pre.params, select_seed);
      break;
    case WrapperMethod::Kind::Backward:
      selected =
          backward_eliminate(kind, train, method.tolerance, folds, pre.params, select_seed);
      break;
    case WrapperMethod::Kind::FixedK:
      selected = forward_select_k(kind, train, method.k, folds, pre.params, select_seed);
      break;
  }
  report.subset = std::move(selected.first);
  report.trace = std::move(selected.second);

  if (report.subset.names.empty()) {
    // Nothing cleared the bar: stand in a majority-class predictor so the
    // report still carries test metrics (FAR lands on the footnote value).
    report.degenerate = true;
    report.params_post = report.params_pre;
    report.cv_auc_post = 0.5;
    std::size_t positives = 0;
    for (int v : train.target) positives += static_cast<std::size_t>(v);
    double majority = 2 * positives > train.target.size() ? 1.0 : 0.0;
    std::vector<double> scores(test.target.size(), majority);
    report.test_metrics = evaluate_scores(test.target, scores, 0.5);
    return report;
  }

  std::vector<int> cols;
  for (const std::string& name : report.subset.names) {
    int c = train.schema.index_of(name);
    if (c < 0) throw InvalidArgument("run_wrapper_protocol: unknown feature '" + name + "'");
    cols.push_back(c);
  }
  std::sort(cols.begin(), cols.end());
  std::vector<std::string> names;
  for (int c : cols) names.push_back(train.schema.columns[static_cast<std::size_t>(c)].name);
  Matrix x_train = train.features.select_columns(cols);
  Matrix x_test = test.features.select_columns(cols);

  KindSearch post = search_kind_params(kind, config.budget, x_train, train.target, folds,
                                       derive_seed(seed, "params_post"), config.sbel_folds);
  report.params_post = post.params;
  report.cv_auc_post = post.cv_auc;

  TrainedModel model = fit(kind, post.params, x_train, train.target,
                           derive_seed(seed, "final_fit"), names);
  report.test_metrics = evaluate_scores(test.target, predict_scores(model, x_test),
                                        default_threshold(kind));
  return report;
}

std::string to_json(const ProtocolReport& report) {
  json trace = json::array();
  for (const SelectionStep& s : report.trace.steps)
    trace.push_back({{"step", s.step},
                     {"candidates_evaluated", s.candidates_evaluated},
                     {"feature", s.feature},
                     {"added", s.added},
                     {"accepted", s.accepted},
                     {"auc_before", s.auc_before},
                     {"auc_after", s.auc_after},
                     {"delta", s.delta}});
  return json{{"format_version", 1},
              {"kind", kind_name(report.kind)},
              {"method", report.method.name()},
              {"tolerance_or_k", report.method.tolerance_or_k()},
              {"params_pre", report.params_pre.values()},
              {"params_post", report.params_post.values()},
              {"cv_auc_pre", report.cv_auc_pre},
              {"cv_auc_post", report.cv_auc_post},
              {"subset", report.subset.names},
              {"trace", std::move(trace)},
              {"test_metrics", json::parse(to_json(report.test_metrics))},
              {"degenerate", report.degenerate}}
      .dump(2);
}

ProtocolReport protocol_report_from_json(const std::string& text) {
  try {
    json j = json::parse(text);
    if (j.at("format_version").get<int>() != 1)
      throw ParseError("protocol report: unsupported format_version");
    ProtocolReport r;
    r.kind = kind_from_name(j.at("kind").get<std::string>());
    std::string method = j.at("method").get<std::string>();
    double tk = j.at("tolerance_or_k").get<double>();
    if (method == "forward")
      r.method = WrapperMethod::forward(tk);
    else if (method == "backward")
      r.method = WrapperMethod::backward(tk);
    else if (method == "fixed")
      r.method = WrapperMethod::fixed_k(static_cast<int>(tk));
    else
      throw ParseError("protocol report: unknown method '" + method + "'");

    json params_pre = j.value("params_pre", json::object());
    for (const auto& [key, value] : params_pre.items()) r.params_pre.set(key, value.get<double>());
    json params_post = j.value("params_post", json::object());
    for (const auto& [key, value] : params_post.items())
      r.params_post.set(key, value.get<double>());
    r.cv_auc_pre = j.value("cv_auc_pre", 0.0);
    r.cv_auc_post = j.value("cv_auc_post", 0.0);
    r.subset.names = j.at("subset").get<std::vector<std::string>>();
    r.subset.method = method;
    if (method == "fixed")
      r.subset.k = static_cast<int>(tk);
    else
      r.subset.tolerance = tk;
    for (const json& s : j.value("trace", json::array())) {
      SelectionStep step;
      step.step = s.at("step").get<int>();
      step.candidates_evaluated = s.at("candidates_evaluated").get<int>();
      step.feature = s.at("feature").get<std::string>();
      step.added = s.at("added").get<bool>();
      step.accepted = s.at("accepted").get<bool>();
      step.auc_before = s.at("auc_before").get<double>();
      step.auc_after = s.at("auc_after").get<double>();
      step.delta = s.at("delta").get<double>();
      r.trace.steps.push_back(std::move(step));
    }
    r.test_metrics = metrics_bundle_from_json(j.at("test_metrics").dump());
    r.degenerate = j.value("degenerate", false);
    return r;
  } catch (const json::exception& e) {
    throw ParseError(std::string("protocol report: ") + e.what());
  }
}

}  // namespace subsetforge
