#pragma once

#include <cstdint>
#include <vector>

#include "subsetforge/common.hpp"
#include "subsetforge/learners.hpp"

namespace subsetforge {

struct BoostedTreesParams {
  int rounds = 150;
  double learning_rate = 0.1;
  int max_depth = 3;
  double subsample = 1.0;
  double colsample = 1.0;
  double lambda = 1.0;  // L2 regularization on leaf weights
};

// Second-order boosting with logistic loss: per round, gradients
// g = p - y and hessians h = p(1-p) drive greedy splits maximizing
//   0.5 * (GL^2/(HL+lambda) + GR^2/(HR+lambda) - G^2/(H+lambda)),
// leaves take -G/(H+lambda), and exactly `rounds` trees are built.
// Row and column subsampling draw from per-round derived streams.
BoostedTreesModel fit_boosted_trees(const Matrix& features, const std::vector<int>& target,
                                    const BoostedTreesParams& params, std::uint64_t seed);

// Probabilities sigmoid(base_score + sum of tree outputs).
std::vector<double> boosted_scores(const BoostedTreesModel& model, const Matrix& features);

}  // namespace subsetforge
