#include "subsetforge/random_forest.hpp"

#include <cmath>

#include "tree_util.hpp"

namespace subsetforge {

double DecisionTree::predict(const double* row) const {
  int i = 0;
  while (nodes[static_cast<std::size_t>(i)].feature >= 0) {
    const TreeNode& node = nodes[static_cast<std::size_t>(i)];
    i = row[node.feature] <= node.threshold ? node.left : node.right;
  }
  return nodes[static_cast<std::size_t>(i)].value;
}

namespace {

constexpr std::size_t kMaxBins = 64;

struct TreeBuilder {
  const detail::BinnedFeatures& bins;
  const std::vector<int>& target;
  const std::vector<int>& weight;  // bootstrap multiplicity per row
  int max_depth;
  int min_leaf;
  std::size_t k_features;
  std::uint64_t tree_seed;

  std::vector<int> rows;  // indices with nonzero weight, partitioned in place
  std::vector<TreeNode> nodes;
  std::uint64_t node_counter = 0;

  static double impurity(double w, double wp) {
    // Gini: 2 p (1-p), scaled by nothing (weights applied by caller)
    double p = wp / w;
    return 2.0 * p * (1.0 - p);
  }

  int build(std::size_t begin, std::size_t end, int depth) {
    double total_w = 0.0, pos_w = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      double w = weight[static_cast<std::size_t>(rows[i])];
      total_w += w;
      pos_w += w * target[static_cast<std::size_t>(rows[i])];
    }

    int index = static_cast<int>(nodes.size());
    nodes.push_back({});
    std::uint64_t node_seed = derive_seed(tree_seed, "node", node_counter++);

    bool stop = depth >= max_depth || pos_w == 0.0 || pos_w == total_w ||
                total_w < 2.0 * static_cast<double>(min_leaf);
    if (!stop) {
      Rng rng(node_seed);
      std::vector<int> feats = detail::sample_features(bins.cols, k_features, rng);

      double parent_imp = impurity(total_w, pos_w);
      double best_gain = 1e-12;
      int best_feature = -1;
      std::size_t best_bin = 0;

      double wtot[kMaxBins], wpos[kMaxBins];
      for (int f : feats) {
        std::size_t nb = bins.bin_count(static_cast<std::size_t>(f));
        if (nb < 2) continue;
        for (std::size_t b = 0; b < nb; ++b) wtot[b] = wpos[b] = 0.0;
        for (std::size_t i = begin; i < end; ++i) {
          int r = rows[i];
          std::uint8_t code = bins.code(static_cast<std::size_t>(r),
                                        static_cast<std::size_t>(f));
          double w = weight[static_cast<std::size_t>(r)];
          wtot[code] += w;
          wpos[code] += w * target[static_cast<std::size_t>(r)];
        }
        double lw = 0.0, lp = 0.0;
        for (std::size_t b = 0; b + 1 < nb; ++b) {
          lw += wtot[b];
          lp += wpos[b];
          double rw = total_w - lw, rp = pos_w - lp;
          if (lw < min_leaf || rw < min_leaf) continue;
          double gain = parent_imp -
                        (lw * impurity(lw, lp) + rw * impurity(rw, rp)) / total_w;
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
    nodes[static_cast<std::size_t>(index)].value = pos_w > total_w - pos_w ? 1.0 : 0.0;
    return index;
  }
};

}  // namespace

ForestModel fit_random_forest(const Matrix& features, const std::vector<int>& target,
                              const ForestParams& params, std::uint64_t seed) {
  std::size_t n = features.rows, d = features.cols;
  detail::BinnedFeatures bins = detail::bin_features(features, kMaxBins);
  std::size_t k = static_cast<std::size_t>(std::clamp<long long>(
      std::llround(params.feature_fraction * static_cast<double>(d)), 1,
      static_cast<long long>(d)));

  ForestModel model;
  model.trees.resize(static_cast<std::size_t>(params.trees));
  parallel_for(static_cast<std::size_t>(params.trees), [&](std::size_t t) {
    std::uint64_t tree_seed = derive_seed(seed, "rf_tree", t);
    std::vector<int> weight(n, 1);
    if (params.bootstrap) {
      std::fill(weight.begin(), weight.end(), 0);
      Rng rng(derive_seed(tree_seed, "bootstrap"));
      for (std::size_t i = 0; i < n; ++i)
        weight[static_cast<std::size_t>(rng.uniform_int(0, static_cast<long long>(n) - 1))]++;
    }
    TreeBuilder builder{bins, target, weight, params.max_depth,
                        params.min_leaf, k, tree_seed, {}, {}, 0};
    for (std::size_t i = 0; i < n; ++i)
      if (weight[i] > 0) builder.rows.push_back(static_cast<int>(i));
    builder.build(0, builder.rows.size(), 0);
    model.trees[t].nodes = std::move(builder.nodes);
  });
  return model;
}

std::vector<double> forest_scores(const ForestModel& model, const Matrix& features) {
  std::vector<double> out(features.rows, 0.0);
  double inv = 1.0 / static_cast<double>(model.trees.size());
  for (std::size_t i = 0; i < features.rows; ++i) {
    const double* row = features.row_ptr(i);
    double votes = 0.0;
    for (const DecisionTree& tree : model.trees) votes += tree.predict(row);
    out[i] = votes * inv;
  }
  return out;
}

}  // namespace subsetforge
