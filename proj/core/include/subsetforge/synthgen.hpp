#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "subsetforge/dataset.hpp"
#include "subsetforge/schema.hpp"

namespace subsetforge {

// One per schema column; which fields apply depends on the column kind.
struct Marginal {
  ColumnKind kind = ColumnKind::Binary;
  double p_one = 0.0;                    // binary
  std::vector<double> category_probs;    // ordinal, values 1..k
  double mean = 0.0;                     // continuous
  double stddev = 1.0;
  double lo = 0.0;
  double hi = 0.0;
  bool log_scale = false;                // heavy-tailed: normal on log scale

  bool operator==(const Marginal&) const = default;
};

struct MarginalSpec {
  std::vector<Marginal> columns;  // schema order

  bool operator==(const MarginalSpec&) const = default;
};

// Built-in marginals for the canonical schema: continuous (mean, stddev,
// min, max) triples for NoMO / Registered Capital / AIR, per-column
// probabilities for the binary indicators, and city-tier probabilities for
// Geographical Location.
MarginalSpec reference_marginals();

struct GeneratorConfig {
  std::size_t n_rows = 2438;
  double target_rate = 0.3798;
  std::vector<double> coefficients;  // signed weight per schema column
  double noise_std = 0.5;
  std::uint64_t seed = 42;
  MarginalSpec marginals;

  bool operator==(const GeneratorConfig&) const = default;
};

// Signed unit weights on the seven strongest reference correlates
// (Company License, BDM, Multiple Loans, NoMO, No Supervisory Mechanism,
// Auto Bidding, AIR), zero elsewhere.
std::vector<double> default_coefficients();

// Index positions of the nonzero default coefficients, schema order.
std::vector<int> planted_feature_indices();

GeneratorConfig default_generator_config(std::uint64_t seed);

// Features drawn independently per column marginal; the target follows a
// logistic model on nominally standardized features plus Gaussian noise,
// with the intercept calibrated so the realized positive count equals
// round(n_rows * target_rate) exactly. Deterministic given the seed; rows
// use independent derived substreams, so generation parallelizes.
Dataset generate(const GeneratorConfig& config);

std::string to_json(const GeneratorConfig& config);
GeneratorConfig generator_config_from_json(const std::string& text);

}  // namespace subsetforge
