#pragma once

#include <cstdint>
#include <vector>

#include "subsetforge/common.hpp"
#include "subsetforge/learners.hpp"

namespace subsetforge {

struct ForestParams {
  int trees = 100;
  int max_depth = 10;
  int min_leaf = 5;
  double feature_fraction = 0.6;
  bool bootstrap = true;
};

// CART trees on binned features, Gini impurity, bootstrap resampling as
// per-row weights, per-node feature subsets. Per-tree seeds derive from
// (seed, tree index), so parallel tree construction cannot change results.
ForestModel fit_random_forest(const Matrix& features, const std::vector<int>& target,
                              const ForestParams& params, std::uint64_t seed);

// Fraction of trees voting positive.
std::vector<double> forest_scores(const ForestModel& model, const Matrix& features);

}  // namespace subsetforge
