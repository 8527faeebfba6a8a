#include "subsetforge/linear_svm.hpp"

#include <cmath>
#include <numeric>

namespace subsetforge {

LinearSvmModel fit_linear_svm(const Matrix& features, const std::vector<int>& target,
                              double C, int epochs, std::uint64_t seed) {
  std::size_t n = features.rows, d = features.cols;
  double lambda = 1.0 / (C * static_cast<double>(n));
  double radius = 1.0 / std::sqrt(lambda);  // Pegasos feasible-ball bound

  LinearSvmModel model;
  model.weights.assign(d, 0.0);
  model.bias = 0.0;

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);

  long long t = 0;
  for (int epoch = 0; epoch < epochs; ++epoch) {
    Rng rng(derive_seed(seed, "svm_epoch", static_cast<std::uint64_t>(epoch)));
    rng.shuffle(order);
    for (int idx : order) {
      ++t;
      double eta = 1.0 / (lambda * static_cast<double>(t));
      const double* x = features.row_ptr(static_cast<std::size_t>(idx));
      double y = target[static_cast<std::size_t>(idx)] == 1 ? 1.0 : -1.0;
      double margin = model.bias;
      for (std::size_t j = 0; j < d; ++j) margin += model.weights[j] * x[j];

      double shrink = 1.0 - eta * lambda;
      for (std::size_t j = 0; j < d; ++j) model.weights[j] *= shrink;
      if (y * margin < 1.0) {
        for (std::size_t j = 0; j < d; ++j) model.weights[j] += eta * y * x[j];
        model.bias += eta * y;
      }
      double norm_sq = 0.0;
      for (double w : model.weights) norm_sq += w * w;
      if (norm_sq > radius * radius) {
        double scale = radius / std::sqrt(norm_sq);
        for (double& w : model.weights) w *= scale;
      }
    }
  }
  return model;
}

std::vector<double> svm_margins(const LinearSvmModel& model, const Matrix& features) {
  if (features.cols != model.weights.size())
    throw InvalidArgument("svm_margins: feature count mismatch");
  std::vector<double> out(features.rows);
  for (std::size_t i = 0; i < features.rows; ++i) {
    const double* x = features.row_ptr(i);
    double margin = model.bias;
    for (std::size_t j = 0; j < model.weights.size(); ++j) margin += model.weights[j] * x[j];
    out[i] = margin;
  }
  return out;
}

}  // namespace subsetforge
