#pragma once

#include <cstdint>
#include <vector>

#include "subsetforge/common.hpp"
#include "subsetforge/learners.hpp"

namespace subsetforge {

// L2-regularized hinge loss trained by epoch-based subgradient descent
// (Pegasos schedule, lambda = 1/(C n)); the bias is unregularized. The
// sample order is reshuffled each epoch from a seed-derived stream, so the
// result is deterministic.
LinearSvmModel fit_linear_svm(const Matrix& features, const std::vector<int>& target,
                              double C, int epochs, std::uint64_t seed);

// Signed margins w . x + b.
std::vector<double> svm_margins(const LinearSvmModel& model, const Matrix& features);

}  // namespace subsetforge
