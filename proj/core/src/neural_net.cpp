#include "subsetforge/neural_net.hpp"

#include <cmath>
#include <numeric>

#include "subsetforge/logistic.hpp"

namespace subsetforge {

std::size_t ann_param_count(std::size_t inputs, std::size_t hidden) {
  return hidden * inputs + hidden + hidden + 1;
}

std::vector<double> ann_pack(const NeuralNetModel& model) {
  std::vector<double> theta;
  theta.reserve(ann_param_count(model.inputs, model.hidden));
  theta.insert(theta.end(), model.w1.begin(), model.w1.end());
  theta.insert(theta.end(), model.b1.begin(), model.b1.end());
  theta.insert(theta.end(), model.w2.begin(), model.w2.end());
  theta.push_back(model.b2);
  return theta;
}

NeuralNetModel ann_unpack(const std::vector<double>& theta, std::size_t inputs,
                          std::size_t hidden) {
  if (theta.size() != ann_param_count(inputs, hidden))
    throw InvalidArgument("ann_unpack: parameter count mismatch");
  NeuralNetModel m;
  m.inputs = inputs;
  m.hidden = hidden;
  auto it = theta.begin();
  m.w1.assign(it, it + static_cast<std::ptrdiff_t>(hidden * inputs));
  it += static_cast<std::ptrdiff_t>(hidden * inputs);
  m.b1.assign(it, it + static_cast<std::ptrdiff_t>(hidden));
  it += static_cast<std::ptrdiff_t>(hidden);
  m.w2.assign(it, it + static_cast<std::ptrdiff_t>(hidden));
  it += static_cast<std::ptrdiff_t>(hidden);
  m.b2 = *it;
  return m;
}

namespace {

// z and hidden pre-activations for one row.
double forward_row(const double* theta, std::size_t d, std::size_t h, const double* x,
                   double* pre) {
  const double* w1 = theta;
  const double* b1 = theta + h * d;
  const double* w2 = b1 + h;
  double b2 = w2[h];
  double z = b2;
  for (std::size_t k = 0; k < h; ++k) {
    double a = b1[k];
    const double* wrow = w1 + k * d;
    for (std::size_t j = 0; j < d; ++j) a += wrow[j] * x[j];
    pre[k] = a;
    if (a > 0.0) z += w2[k] * a;
  }
  return z;
}

}  // namespace

double ann_loss(const std::vector<double>& theta, std::size_t inputs, std::size_t hidden,
                const Matrix& features, const std::vector<int>& target, double l2) {
  std::size_t n = features.rows;
  std::vector<double> pre(hidden);
  double loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double z = forward_row(theta.data(), inputs, hidden, features.row_ptr(i), pre.data());
    loss += softplus(z) - static_cast<double>(target[i]) * z;
  }
  loss /= static_cast<double>(n);
  double reg = 0.0;
  std::size_t w1_count = hidden * inputs;
  for (std::size_t j = 0; j < w1_count; ++j) reg += theta[j] * theta[j];
  const double* w2 = theta.data() + w1_count + hidden;
  for (std::size_t k = 0; k < hidden; ++k) reg += w2[k] * w2[k];
  return loss + 0.5 * l2 * reg;
}

namespace {

// Adds the batch gradient of mean cross-entropy over rows[from, to) plus the
// full L2 term; out must be zeroed by the caller.
void batch_gradient(const double* theta, std::size_t d, std::size_t h, const Matrix& X,
                    const std::vector<int>& y, const int* rows, std::size_t count,
                    double l2, double* out, double* pre) {
  const double* w1 = theta;
  const double* b1 = theta + h * d;
  const double* w2 = b1 + h;
  double* g_w1 = out;
  double* g_b1 = out + h * d;
  double* g_w2 = g_b1 + h;
  double* g_b2 = g_w2 + h;

  double inv = 1.0 / static_cast<double>(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t r = static_cast<std::size_t>(rows[i]);
    const double* x = X.row_ptr(r);
    double z = forward_row(theta, d, h, x, pre);
    double dz = (sigmoid(z) - static_cast<double>(y[r])) * inv;
    *g_b2 += dz;
    for (std::size_t k = 0; k < h; ++k) {
      if (pre[k] > 0.0) {
        g_w2[k] += dz * pre[k];
        double dpre = dz * w2[k];
        g_b1[k] += dpre;
        double* grow = g_w1 + k * d;
        for (std::size_t j = 0; j < d; ++j) grow[j] += dpre * x[j];
      }
    }
  }
  for (std::size_t j = 0; j < h * d; ++j) g_w1[j] += l2 * w1[j];
  for (std::size_t k = 0; k < h; ++k) g_w2[k] += l2 * w2[k];
}

}  // namespace

std::vector<double> ann_gradient(const std::vector<double>& theta, std::size_t inputs,
                                 std::size_t hidden, const Matrix& features,
                                 const std::vector<int>& target, double l2) {
  std::vector<int> rows(features.rows);
  std::iota(rows.begin(), rows.end(), 0);
  std::vector<double> grad(theta.size(), 0.0), pre(hidden);
  batch_gradient(theta.data(), inputs, hidden, features, target, rows.data(), rows.size(),
                 l2, grad.data(), pre.data());
  return grad;
}

NeuralNetModel fit_neural_net(const Matrix& features, const std::vector<int>& target,
                              const NeuralNetParams& params, std::uint64_t seed) {
  std::size_t n = features.rows, d = features.cols;
  std::size_t h = static_cast<std::size_t>(params.hidden);

  Rng init_rng(derive_seed(seed, "ann_init"));
  std::vector<double> theta(ann_param_count(d, h), 0.0);
  double w1_std = std::sqrt(2.0 / static_cast<double>(d));
  double w2_std = std::sqrt(1.0 / static_cast<double>(h));
  for (std::size_t j = 0; j < h * d; ++j) theta[j] = init_rng.normal(0.0, w1_std);
  for (std::size_t k = 0; k < h; ++k) theta[h * d + h + k] = init_rng.normal(0.0, w2_std);

  constexpr std::size_t kBatch = 64;
  constexpr double kPlateauRel = 1e-5;
  constexpr int kPatience = 20;

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> grad(theta.size()), pre(h);

  double prev_loss = ann_loss(theta, d, h, features, target, params.l2);
  int flat_epochs = 0;
  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    double lr = params.learning_rate;
    if (epoch >= (3 * params.epochs) / 4)
      lr *= 0.25;
    else if (epoch >= params.epochs / 2)
      lr *= 0.5;

    Rng rng(derive_seed(seed, "ann_epoch", static_cast<std::uint64_t>(epoch)));
    rng.shuffle(order);
    for (std::size_t start = 0; start < n; start += kBatch) {
      std::size_t count = std::min(kBatch, n - start);
      std::fill(grad.begin(), grad.end(), 0.0);
      batch_gradient(theta.data(), d, h, features, target, order.data() + start, count,
                     params.l2, grad.data(), pre.data());
      for (std::size_t j = 0; j < theta.size(); ++j) theta[j] -= lr * grad[j];
    }

    double loss = ann_loss(theta, d, h, features, target, params.l2);
    double improvement = (prev_loss - loss) / std::max(prev_loss, 1e-12);
    flat_epochs = improvement < kPlateauRel ? flat_epochs + 1 : 0;
    prev_loss = loss;
    if (flat_epochs >= kPatience) break;
  }

  return ann_unpack(theta, d, h);
}

std::vector<double> neural_net_scores(const NeuralNetModel& model, const Matrix& features) {
  if (features.cols != model.inputs)
    throw InvalidArgument("neural_net_scores: feature count mismatch");
  std::vector<double> theta = ann_pack(model);
  std::vector<double> pre(model.hidden);
  std::vector<double> out(features.rows);
  for (std::size_t i = 0; i < features.rows; ++i)
    out[i] = sigmoid(forward_row(theta.data(), model.inputs, model.hidden,
                                 features.row_ptr(i), pre.data()));
  return out;
}

}  // namespace subsetforge
