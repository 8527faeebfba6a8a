#pragma once

#include <cstdint>
#include <vector>

#include "subsetforge/common.hpp"
#include "subsetforge/learners.hpp"

namespace subsetforge {

struct NeuralNetParams {
  int hidden = 32;
  double learning_rate = 0.01;
  int epochs = 150;
  double l2 = 1e-4;
};

// Flat parameter layout used by the loss/gradient helpers:
// [w1 (hidden x inputs), b1 (hidden), w2 (hidden), b2].
std::size_t ann_param_count(std::size_t inputs, std::size_t hidden);
std::vector<double> ann_pack(const NeuralNetModel& model);
NeuralNetModel ann_unpack(const std::vector<double>& theta, std::size_t inputs,
                          std::size_t hidden);

// Mean cross-entropy plus (l2/2) * (||w1||^2 + ||w2||^2); biases are free.
double ann_loss(const std::vector<double>& theta, std::size_t inputs, std::size_t hidden,
                const Matrix& features, const std::vector<int>& target, double l2);

// Backpropagated gradient of ann_loss.
std::vector<double> ann_gradient(const std::vector<double>& theta, std::size_t inputs,
                                 std::size_t hidden, const Matrix& features,
                                 const std::vector<int>& target, double l2);

// One ReLU hidden layer with a sigmoid output, trained by mini-batch
// gradient descent (batch 64) under a step-decay learning-rate schedule
// (full rate, then x0.5 after 50% of epochs, x0.25 after 75%). Training
// halts early once the epoch-level training loss has improved by less than
// a 1e-5 relative factor for 20 consecutive epochs.
NeuralNetModel fit_neural_net(const Matrix& features, const std::vector<int>& target,
                              const NeuralNetParams& params, std::uint64_t seed);

std::vector<double> neural_net_scores(const NeuralNetModel& model, const Matrix& features);

}  // namespace subsetforge
