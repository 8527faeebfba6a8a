#include "subsetforge/boosted_trees.hpp"

#include <cmath>

#include "subsetforge/logistic.hpp"
#include "tree_util.hpp"

namespace subsetforge {

namespace {

constexpr std::size_t kMaxBins = 64;

struct BoostTreeBuilder {
  const detail::BinnedFeatures& bins;
  const std::vector<double>& grad;
  const std::vector<double>& hess;
  const std::vector<int>& feats;  // columns available to this tree
  int max_depth;
  double lambda;
  double shrinkage;

  std::vector<int> rows;
  std::vector<TreeNode> nodes;

  int build(std::size_t begin, std::size_t end, int depth) {
    double g_sum = 0.0, h_sum = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      g_sum += grad[static_cast<std::size_t>(rows[i])];
      h_sum += hess[static_cast<std::size_t>(rows[i])];
    }

    int index = static_cast<int>(nodes.size());
    nodes.push_back({});

    if (depth < max_depth && end - begin >= 2) {
      double parent_score = g_sum * g_sum / (h_sum + lambda);
      double best_gain = 1e-12;
      int best_feature = -1;
      std::size_t best_bin = 0;

      double gb[kMaxBins], hb[kMaxBins];
      bool nb_any[kMaxBins];
      for (int f : feats) {
        std::size_t nb = bins.bin_count(static_cast<std::size_t>(f));
        if (nb < 2) continue;
        for (std::size_t b = 0; b < nb; ++b) {
          gb[b] = hb[b] = 0.0;
          nb_any[b] = false;
        }
        for (std::size_t i = begin; i < end; ++i) {
          int r = rows[i];
          std::uint8_t code = bins.code(static_cast<std::size_t>(r),
                                        static_cast<std::size_t>(f));
          gb[code] += grad[static_cast<std::size_t>(r)];
          hb[code] += hess[static_cast<std::size_t>(r)];
          nb_any[code] = true;
        }
        double gl = 0.0, hl = 0.0;
        bool left_any = false;
        for (std::size_t b = 0; b + 1 < nb; ++b) {
          gl += gb[b];
          hl += hb[b];
          left_any = left_any || nb_any[b];
          if (!left_any) continue;
          bool right_any = false;
          for (std::size_t b2 = b + 1; b2 < nb && !right_any; ++b2) right_any = nb_any[b2];
          if (!right_any) break;
          double gr = g_sum - gl, hr = h_sum - hl;
          double gain = 0.5 * (gl * gl / (hl + lambda) + gr * gr / (hr + lambda) -
                               parent_score);
          if (gain > best_gain) {
            best_gain = gain;
            best_feature = f;
            best_bin = b;
          }
        }
      }

      if (best_feature >= 0) {
        auto mid_it = std::stable_partition(
            rows.begin() + static_cast<std::ptrdiff_t>(begin),
            rows.begin() + static_cast<std::ptrdiff_t>(end), [&](int r) {
              return bins.code(static_cast<std::size_t>(r),
                               static_cast<std::size_t>(best_feature)) <= best_bin;
            });
        std::size_t mid = static_cast<std::size_t>(mid_it - rows.begin());
        nodes[static_cast<std::size_t>(index)].feature = best_feature;
        nodes[static_cast<std::size_t>(index)].threshold =
            bins.thresholds[static_cast<std::size_t>(best_feature)][best_bin];
        int left = build(begin, mid, depth + 1);
        int right = build(mid, end, depth + 1);
        nodes[static_cast<std::size_t>(index)].left = left;
        nodes[static_cast<std::size_t>(index)].right = right;
        return index;
      }
    }

    nodes[static_cast<std::size_t>(index)].feature = -1;
    nodes[static_cast<std::size_t>(index)].value =
        shrinkage * (-g_sum / (h_sum + lambda));
    return index;
  }
};

}  // namespace

BoostedTreesModel fit_boosted_trees(const Matrix& features, const std::vector<int>& target,
                                    const BoostedTreesParams& params, std::uint64_t seed) {
  std::size_t n = features.rows, d = features.cols;
  detail::BinnedFeatures bins = detail::bin_features(features, kMaxBins);

  double pos = 0.0;
  for (int y : target) pos += y;
  double rate = pos / static_cast<double>(n);

  BoostedTreesModel model;
  model.base_score = std::log(rate / (1.0 - rate));
  model.trees.reserve(static_cast<std::size_t>(params.rounds));

  std::vector<double> margin(n, model.base_score);
  std::vector<double> grad(n), hess(n);
  std::size_t k_cols = static_cast<std::size_t>(std::clamp<long long>(
      std::llround(params.colsample * static_cast<double>(d)), 1,
      static_cast<long long>(d)));

  for (int round = 0; round < params.rounds; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      double p = sigmoid(margin[i]);
      grad[i] = p - static_cast<double>(target[i]);
      hess[i] = p * (1.0 - p);
    }

    Rng rng(derive_seed(seed, "gbt_round", static_cast<std::uint64_t>(round)));
    std::vector<int> feats = detail::sample_features(d, k_cols, rng);
    std::vector<int> included;
    included.reserve(n);
    if (params.subsample < 1.0) {
      for (std::size_t i = 0; i < n; ++i)
        if (rng.uniform() < params.subsample) included.push_back(static_cast<int>(i));
      if (included.empty()) included.push_back(0);  // degenerate draw, keep the round alive
    } else {
      for (std::size_t i = 0; i < n; ++i) included.push_back(static_cast<int>(i));
    }

    BoostTreeBuilder builder{bins,           grad,         hess, feats,
                             params.max_depth, params.lambda, params.learning_rate,
                             std::move(included), {}};
    builder.build(0, builder.rows.size(), 0);

    DecisionTree tree;
    tree.nodes = std::move(builder.nodes);
    for (std::size_t i = 0; i < n; ++i) margin[i] += tree.predict(features.row_ptr(i));
    model.trees.push_back(std::move(tree));

    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      loss += softplus(margin[i]) - static_cast<double>(target[i]) * margin[i];
    model.train_loss.push_back(loss / static_cast<double>(n));
  }
  return model;
}

std::vector<double> boosted_scores(const BoostedTreesModel& model, const Matrix& features) {
  std::vector<double> out(features.rows);
  for (std::size_t i = 0; i < features.rows; ++i) {
    const double* row = features.row_ptr(i);
    double margin = model.base_score;
    for (const DecisionTree& tree : model.trees) margin += tree.predict(row);
    out[i] = sigmoid(margin);
  }
  return out;
}

}  // namespace subsetforge
