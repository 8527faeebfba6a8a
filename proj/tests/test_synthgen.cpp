#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "subsetforge/metrics.hpp"
#include "subsetforge/synthgen.hpp"

using namespace subsetforge;

namespace {

int positives(const Dataset& d) {
  int n = 0;
  for (int t : d.target) n += t;
  return n;
}

}  // namespace

TEST_CASE("generation is deterministic and thread-count independent") {
  GeneratorConfig config = default_generator_config(11);
  config.n_rows = 400;

  Dataset a = generate(config);
  Dataset b = generate(config);
  CHECK(a.features == b.features);
  CHECK(a.target == b.target);
  CHECK(a.provenance.kind == ProvenanceKind::Synthetic);
  CHECK(a.provenance.seed == 11);

  set_max_threads(4);
  Dataset c = generate(config);
  set_max_threads(0);
  CHECK(c.features == a.features);
  CHECK(c.target == a.target);

  config.seed = 12;
  Dataset other = generate(config);
  CHECK(other.features != a.features);
}

TEST_CASE("positive count matches the configured rate exactly") {
  GeneratorConfig config = default_generator_config(3);
  config.n_rows = 2438;
  CHECK(positives(generate(config)) == 926);  // round(2438 * 0.3798)

  config.n_rows = 401;
  config.target_rate = 0.25;
  CHECK(positives(generate(config)) == 100);  // round(100.25)

  config.seed = 99;
  CHECK(positives(generate(config)) == 100);  // calibration holds per seed
}

TEST_CASE("draws respect the column marginals") {
  GeneratorConfig config = default_generator_config(7);
  Dataset d = generate(config);
  const FeatureSchema& schema = d.schema;
  const MarginalSpec& marginals = config.marginals;

  // Everything the validator checks must hold by construction, including
  // the nine-month operating-history floor.
  CHECK(validate(d).ok());

  double n = static_cast<double>(d.n_rows());
  for (std::size_t c = 0; c < schema.columns.size(); ++c) {
    const Marginal& m = marginals.columns[c];
    std::vector<double> col = d.features.column(c);
    switch (schema.columns[c].kind) {
      case ColumnKind::Binary: {
        double freq = 0.0;
        for (double v : col) freq += v;
        freq /= n;
        INFO(schema.columns[c].name);
        CHECK(std::fabs(freq - m.p_one) < 0.05);  // ~5 binomial sd at n=2438
        break;
      }
      case ColumnKind::Ordinal:
        for (double v : col) {
          CHECK(v >= 1.0);
          CHECK(v <= static_cast<double>(m.category_probs.size()));
        }
        break;
      case ColumnKind::Continuous:
        for (double v : col) {
          CHECK(v >= m.lo);
          CHECK(v <= m.hi);
        }
        break;
    }
  }
}

TEST_CASE("planted coefficients leave a matching rank-correlation signature") {
  Dataset d = generate(default_generator_config(42));
  std::vector<double> beta = default_coefficients();
  std::vector<double> y(d.target.begin(), d.target.end());

  for (int idx : planted_feature_indices()) {
    std::size_t c = static_cast<std::size_t>(idx);
    double rho = spearman(d.features.column(c), y);
    INFO(d.schema.columns[c].name, " rho=", rho);
    CHECK(std::fabs(rho) > 0.05);
    CHECK(rho * beta[c] > 0.0);  // sign agrees with the planted weight
  }

  // Unplanted columns carry no signal beyond sampling noise.
  int quiet = d.schema.index_of("Listed Company");
  REQUIRE(quiet >= 0);
  double rho = spearman(d.features.column(static_cast<std::size_t>(quiet)), y);
  CHECK(std::fabs(rho) < 0.06);
}

TEST_CASE("planted indices mirror the nonzero coefficients") {
  std::vector<double> beta = default_coefficients();
  std::vector<int> idx = planted_feature_indices();
  CHECK(idx.size() == 7);
  std::vector<int> expect;
  for (std::size_t i = 0; i < beta.size(); ++i)
    if (beta[i] != 0.0) expect.push_back(static_cast<int>(i));
  CHECK(idx == expect);
}

TEST_CASE("generator config survives a JSON round trip") {
  GeneratorConfig config = default_generator_config(5);
  config.n_rows = 123;
  config.target_rate = 0.42;
  config.noise_std = 0.75;
  config.coefficients[2] = -0.5;

  GeneratorConfig back = generator_config_from_json(to_json(config));
  CHECK(back == config);

  CHECK_THROWS_AS(generator_config_from_json("not json"), ParseError);
  CHECK_THROWS_AS(generator_config_from_json("{\"format_version\": 99}"), ParseError);
}

TEST_CASE("generator validates its configuration") {
  GeneratorConfig config = default_generator_config(1);

  GeneratorConfig bad = config;
  bad.n_rows = 1;
  CHECK_THROWS_AS(generate(bad), InvalidArgument);

  bad = config;
  bad.target_rate = 0.0;
  CHECK_THROWS_AS(generate(bad), InvalidArgument);

  bad = config;
  bad.noise_std = -1.0;
  CHECK_THROWS_AS(generate(bad), InvalidArgument);

  bad = config;
  bad.coefficients.pop_back();
  CHECK_THROWS_AS(generate(bad), InvalidArgument);

  bad = config;
  bad.marginals.columns.pop_back();
  CHECK_THROWS_AS(generate(bad), InvalidArgument);

  // A rate that rounds to zero positives cannot be calibrated.
  bad = config;
  bad.n_rows = 100;
  bad.target_rate = 0.001;
  CHECK_THROWS_AS(generate(bad), CalibrationError);
}
