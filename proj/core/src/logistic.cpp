#include "subsetforge/logistic.hpp"

#include <cmath>

namespace subsetforge {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

double softplus(double z) {
  if (z > 0.0) return z + std::log1p(std::exp(-z));
  return std::log1p(std::exp(z));
}

double logistic_objective(const Matrix& features, const std::vector<int>& target,
                          double C, const std::vector<double>& theta) {
  std::size_t n = features.rows, d = features.cols;
  double loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double* x = features.row_ptr(i);
    double z = theta[0];
    for (std::size_t j = 0; j < d; ++j) z += theta[j + 1] * x[j];
    loss += softplus(z) - static_cast<double>(target[i]) * z;
  }
  loss /= static_cast<double>(n);
  double penalty = 0.0;
  for (std::size_t j = 0; j < d; ++j) penalty += theta[j + 1] * theta[j + 1];
  return loss + penalty / (2.0 * C * static_cast<double>(n));
}

std::vector<double> logistic_gradient(const Matrix& features, const std::vector<int>& target,
                                      double C, const std::vector<double>& theta) {
  std::size_t n = features.rows, d = features.cols;
  std::vector<double> grad(d + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double* x = features.row_ptr(i);
    double z = theta[0];
    for (std::size_t j = 0; j < d; ++j) z += theta[j + 1] * x[j];
    double r = sigmoid(z) - static_cast<double>(target[i]);
    grad[0] += r;
    for (std::size_t j = 0; j < d; ++j) grad[j + 1] += r * x[j];
  }
  double inv_n = 1.0 / static_cast<double>(n);
  for (double& g : grad) g *= inv_n;
  double reg = 1.0 / (C * static_cast<double>(n));
  for (std::size_t j = 0; j < d; ++j) grad[j + 1] += reg * theta[j + 1];
  return grad;
}

namespace {

// In-place Cholesky solve of A x = b for symmetric positive definite A;
// false when a pivot fails.
bool cholesky_solve(std::vector<double>& a, std::vector<double> b, std::size_t m,
                    std::vector<double>& x) {
  for (std::size_t j = 0; j < m; ++j) {
    double diag = a[j * m + j];
    for (std::size_t k = 0; k < j; ++k) diag -= a[j * m + k] * a[j * m + k];
    if (diag <= 0.0) return false;
    diag = std::sqrt(diag);
    a[j * m + j] = diag;
    for (std::size_t i = j + 1; i < m; ++i) {
      double v = a[i * m + j];
      for (std::size_t k = 0; k < j; ++k) v -= a[i * m + k] * a[j * m + k];
      a[i * m + j] = v / diag;
    }
  }
  // Forward then backward substitution.
  for (std::size_t i = 0; i < m; ++i) {
    double v = b[i];
    for (std::size_t k = 0; k < i; ++k) v -= a[i * m + k] * b[k];
    b[i] = v / a[i * m + i];
  }
  x.assign(m, 0.0);
  for (std::size_t ii = m; ii > 0; --ii) {
    std::size_t i = ii - 1;
    double v = b[i];
    for (std::size_t k = i + 1; k < m; ++k) v -= a[k * m + i] * x[k];
    x[i] = v / a[i * m + i];
  }
  return true;
}

}  // namespace

LogisticModel fit_logistic(const Matrix& features, const std::vector<int>& target,
                           double C, int max_iter, double tol) {
  std::size_t n = features.rows, d = features.cols;
  std::size_t m = d + 1;
  std::vector<double> theta(m, 0.0);
  std::vector<double> probs(n), hess(m * m), step;

  for (int iter = 0; iter < max_iter; ++iter) {
    std::vector<double> grad = logistic_gradient(features, target, C, theta);
    double gnorm = 0.0;
    for (double g : grad) gnorm += g * g;
    gnorm = std::sqrt(gnorm);
    if (gnorm <= tol) break;

    for (std::size_t i = 0; i < n; ++i) {
      const double* x = features.row_ptr(i);
      double z = theta[0];
      for (std::size_t j = 0; j < d; ++j) z += theta[j + 1] * x[j];
      double p = sigmoid(z);
      probs[i] = p * (1.0 - p);
    }
    double inv_n = 1.0 / static_cast<double>(n);
    std::fill(hess.begin(), hess.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double* x = features.row_ptr(i);
      double w = probs[i];
      hess[0] += w;
      for (std::size_t j = 0; j < d; ++j) {
        double wx = w * x[j];
        double* hrow = hess.data() + (j + 1) * m;
        hrow[0] += wx;  // intercept column
        for (std::size_t k = 0; k <= j; ++k) hrow[k + 1] += wx * x[k];
      }
    }
    for (double& h : hess) h *= inv_n;
    double reg = 1.0 / (C * static_cast<double>(n));
    for (std::size_t j = 1; j < m; ++j) hess[j * m + j] += reg;
    // Only the lower triangle was accumulated; mirror it upward.
    for (std::size_t r = 0; r < m; ++r)
      for (std::size_t c = r + 1; c < m; ++c) hess[r * m + c] = hess[c * m + r];

    double jitter = 0.0;
    std::vector<double> chol = hess;
    while (!cholesky_solve(chol, grad, m, step)) {
      jitter = jitter == 0.0 ? 1e-10 : jitter * 100.0;
      if (jitter > 1.0) {
        step = grad;  // give up on curvature, take a gradient step
        break;
      }
      chol = hess;
      for (std::size_t j = 0; j < m; ++j) chol[j * m + j] += jitter;
    }

    double descent = 0.0;
    for (std::size_t j = 0; j < m; ++j) descent += grad[j] * step[j];
    if (descent <= 0.0) {
      step = grad;
      descent = gnorm * gnorm;
    }

    double current = logistic_objective(features, target, C, theta);
    double scale = 1.0;
    std::vector<double> trial(m);
    for (int half = 0; half < 60; ++half) {
      for (std::size_t j = 0; j < m; ++j) trial[j] = theta[j] - scale * step[j];
      if (logistic_objective(features, target, C, trial) <=
          current - 1e-4 * scale * descent) {
        theta = trial;
        break;
      }
      scale *= 0.5;
    }
  }

  LogisticModel model;
  model.intercept = theta[0];
  model.weights.assign(theta.begin() + 1, theta.end());
  return model;
}

std::vector<double> logistic_scores(const LogisticModel& model, const Matrix& features) {
  if (features.cols != model.weights.size())
    throw InvalidArgument("logistic_scores: feature count mismatch");
  std::vector<double> out(features.rows);
  for (std::size_t i = 0; i < features.rows; ++i) {
    const double* x = features.row_ptr(i);
    double z = model.intercept;
    for (std::size_t j = 0; j < model.weights.size(); ++j) z += model.weights[j] * x[j];
    out[i] = sigmoid(z);
  }
  return out;
}

}  // namespace subsetforge
