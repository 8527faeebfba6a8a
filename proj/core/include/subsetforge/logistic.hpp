#pragma once

#include <vector>

#include "subsetforge/common.hpp"
#include "subsetforge/learners.hpp"

namespace subsetforge {

// Stable logistic function.
double sigmoid(double z);

// log(1 + exp(z)) without overflow.
double softplus(double z);

// Mean cross-entropy plus L2 penalty on the weights (intercept free):
//   J(theta) = (1/n) sum softplus(z_i) - y_i z_i + (1/(2 C n)) ||w||^2
// with z_i = theta[0] + w . x_i and theta = [intercept, w...].
double logistic_objective(const Matrix& features, const std::vector<int>& target,
                          double C, const std::vector<double>& theta);

// Analytic gradient of logistic_objective with respect to theta.
std::vector<double> logistic_gradient(const Matrix& features, const std::vector<int>& target,
                                      double C, const std::vector<double>& theta);

// Newton iterations with backtracking until the gradient norm drops below
// tol or max_iter is reached.
LogisticModel fit_logistic(const Matrix& features, const std::vector<int>& target,
                           double C, int max_iter, double tol);

std::vector<double> logistic_scores(const LogisticModel& model, const Matrix& features);

}  // namespace subsetforge
