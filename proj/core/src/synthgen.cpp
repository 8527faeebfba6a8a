#include "subsetforge/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "json.hpp"

namespace subsetforge {

namespace {

Marginal binary_marginal(double p) {
  Marginal m;
  m.kind = ColumnKind::Binary;
  m.p_one = p;
  return m;
}

Marginal continuous_marginal(double mean, double stddev, double lo, double hi,
                             bool log_scale = false) {
  Marginal m;
  m.kind = ColumnKind::Continuous;
  m.mean = mean;
  m.stddev = stddev;
  m.lo = lo;
  m.hi = hi;
  m.log_scale = log_scale;
  return m;
}

Marginal ordinal_marginal(std::vector<double> probs) {
  Marginal m;
  m.kind = ColumnKind::Ordinal;
  m.category_probs = std::move(probs);
  return m;
}

double norm_pdf(double x) { return std::exp(-0.5 * x * x) * 0.39894228040143267794; }
double norm_cdf(double x) { return 0.5 * std::erfc(-x * 0.70710678118654752440); }

// Mean of a normal with location loc and scale sd clipped to [lo, hi].
double clipped_normal_mean(double loc, double sd, double lo, double hi) {
  double a = (lo - loc) / sd;
  double b = (hi - loc) / sd;
  return lo * norm_cdf(a) + hi * (1.0 - norm_cdf(b)) +
         loc * (norm_cdf(b) - norm_cdf(a)) + sd * (norm_pdf(a) - norm_pdf(b));
}

// Pre-clip location whose clipped mean equals the requested mean; the
// clipped mean is strictly increasing in the location, so bisection applies.
double calibrate_clip_location(double mean, double sd, double lo, double hi) {
  if (!(mean > lo && mean < hi))
    throw CalibrationError("clipped-normal mean must lie strictly inside [min, max]");
  double a = lo - 50.0 * sd, b = hi + 50.0 * sd;
  if (clipped_normal_mean(a, sd, lo, hi) > mean || clipped_normal_mean(b, sd, lo, hi) < mean)
    throw CalibrationError("clipped-normal mean calibration out of bracket");
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (a + b);
    if (clipped_normal_mean(mid, sd, lo, hi) < mean)
      a = mid;
    else
      b = mid;
  }
  return 0.5 * (a + b);
}

struct ColumnSampler {
  const Marginal* marginal = nullptr;
  double draw_loc = 0.0;    // pre-clip location (linear) or log-location
  double draw_scale = 1.0;  // pre-clip scale (linear) or log-scale
  double z_mean = 0.0;      // nominal moments used to standardize the
  double z_std = 1.0;       // linear predictor's inputs
};

ColumnSampler make_sampler(const Marginal& m) {
  ColumnSampler s;
  s.marginal = &m;
  switch (m.kind) {
    case ColumnKind::Binary: {
      if (!(m.p_one >= 0.0 && m.p_one <= 1.0))
        throw InvalidArgument("binary marginal probability outside [0,1]");
      s.z_mean = m.p_one;
      double var = m.p_one * (1.0 - m.p_one);
      s.z_std = var > 0.0 ? std::sqrt(var) : 0.0;
      break;
    }
    case ColumnKind::Ordinal: {
      if (m.category_probs.empty())
        throw InvalidArgument("ordinal marginal needs category probabilities");
      double total = 0.0, mean = 0.0, sq = 0.0;
      for (std::size_t k = 0; k < m.category_probs.size(); ++k) {
        double p = m.category_probs[k];
        if (!(p >= 0.0)) throw InvalidArgument("ordinal category probability negative");
        double v = static_cast<double>(k + 1);
        total += p;
        mean += p * v;
        sq += p * v * v;
      }
      if (std::abs(total - 1.0) > 1e-9)
        throw InvalidArgument("ordinal category probabilities must sum to 1");
      s.z_mean = mean;
      double var = sq - mean * mean;
      s.z_std = var > 0.0 ? std::sqrt(var) : 0.0;
      break;
    }
    case ColumnKind::Continuous: {
      if (!(m.stddev > 0.0)) throw InvalidArgument("continuous marginal needs stddev > 0");
      if (!(m.lo <= m.mean && m.mean <= m.hi))
        throw InvalidArgument("continuous marginal needs min <= mean <= max");
      if (m.log_scale) {
        if (!(m.mean > 0.0) || !(m.lo > 0.0))
          throw InvalidArgument("log-scale marginal needs positive mean and min");
        double cv = m.stddev / m.mean;
        double sigma_sq = std::log1p(cv * cv);
        s.draw_scale = std::sqrt(sigma_sq);
        s.draw_loc = std::log(m.mean) - 0.5 * sigma_sq;
      } else {
        s.draw_scale = m.stddev;
        s.draw_loc = calibrate_clip_location(m.mean, m.stddev, m.lo, m.hi);
      }
      s.z_mean = m.mean;
      s.z_std = m.stddev;
      break;
    }
  }
  return s;
}

double sample_column(const ColumnSampler& s, Rng& rng) {
  const Marginal& m = *s.marginal;
  switch (m.kind) {
    case ColumnKind::Binary:
      return rng.uniform() < m.p_one ? 1.0 : 0.0;
    case ColumnKind::Ordinal:
      return static_cast<double>(rng.categorical(m.category_probs) + 1);
    case ColumnKind::Continuous: {
      double raw = m.log_scale ? std::exp(rng.normal(s.draw_loc, s.draw_scale))
                               : rng.normal(s.draw_loc, s.draw_scale);
      return std::clamp(raw, m.lo, m.hi);
    }
  }
  throw InvalidArgument("unknown column kind");
}

const char* kind_name(ColumnKind k) {
  switch (k) {
    case ColumnKind::Continuous: return "continuous";
    case ColumnKind::Binary: return "binary";
    case ColumnKind::Ordinal: return "ordinal";
  }
  return "unknown";
}

ColumnKind kind_from_name(const std::string& name) {
  if (name == "continuous") return ColumnKind::Continuous;
  if (name == "binary") return ColumnKind::Binary;
  if (name == "ordinal") return ColumnKind::Ordinal;
  throw ParseError("unknown column kind \"" + name + "\"");
}

}  // namespace

MarginalSpec reference_marginals() {
  MarginalSpec spec;
  spec.columns = {
      continuous_marginal(34.84, 16.37, 9.0, 157.0),            // NoMO
      ordinal_marginal({0.35, 0.30, 0.15, 0.12, 0.08}),         // Geographical Location
      continuous_marginal(4805.0, 10747.0, 1.0, 285000.0, true),// Registered Capital
      binary_marginal(0.9467),                                  // NE
      binary_marginal(0.1694),                                  // Auto Bidding
      binary_marginal(0.0664),                                  // Car Loan
      binary_marginal(0.0197),                                  // Personal Credit Loan
      binary_marginal(0.0234),                                  // Business Credit Loan
      binary_marginal(0.2588),                                  // Other Loans
      binary_marginal(0.6276),                                  // Multiple Loans
      binary_marginal(0.0033),                                  // Borrow Fee
      binary_marginal(0.0094),                                  // Top-up Fee
      binary_marginal(0.1423),                                  // Withdrawal Fee
      continuous_marginal(12.20, 4.62, 0.0, 48.0),              // AIR
      binary_marginal(0.0911),                                  // Third-party Guarantee
      binary_marginal(0.0021),                                  // Bank Guarantee
      binary_marginal(0.0427),                                  // Risk Reserve
      binary_marginal(0.1624),                                  // CAPM
      binary_marginal(0.1136),                                  // Financing Guarantee
      binary_marginal(0.2317),                                  // BDM
      binary_marginal(0.2810),                                  // Other Guarantee
      binary_marginal(0.3720),                                  // No Guarantee
      binary_marginal(0.0960),                                  // NIFA Membership
      binary_marginal(0.0582),                                  // AVCA
      binary_marginal(0.0607),                                  // TCA
      binary_marginal(0.0853),                                  // Listed Company
      binary_marginal(0.4307),                                  // Company License
      binary_marginal(0.0767),                                  // Operation Permit
      binary_marginal(0.7957),                                  // No Supervisory Mechanism
  };
  return spec;
}

std::vector<double> default_coefficients() {
  const FeatureSchema& schema = canonical_schema();
  std::vector<double> beta(schema.columns.size(), 0.0);
  auto set = [&](const char* name, double value) {
    beta[static_cast<std::size_t>(schema.index_of(name))] = value;
  };
  set("Company License", 1.0);
  set("BDM", 1.0);
  set("Multiple Loans", -1.0);
  set("NoMO", 1.0);
  set("No Supervisory Mechanism", -1.0);
  set("Auto Bidding", 1.0);
  set("AIR", -1.0);
  return beta;
}

std::vector<int> planted_feature_indices() {
  std::vector<double> beta = default_coefficients();
  std::vector<int> idx;
  for (std::size_t i = 0; i < beta.size(); ++i)
    if (beta[i] != 0.0) idx.push_back(static_cast<int>(i));
  return idx;
}

GeneratorConfig default_generator_config(std::uint64_t seed) {
  GeneratorConfig c;
  c.coefficients = default_coefficients();
  c.seed = seed;
  c.marginals = reference_marginals();
  return c;
}

Dataset generate(const GeneratorConfig& config) {
  const FeatureSchema& schema = canonical_schema();
  std::size_t n_cols = schema.columns.size();
  if (config.n_rows < 2) throw InvalidArgument("generate: n_rows must be at least 2");
  if (!(config.target_rate > 0.0 && config.target_rate < 1.0))
    throw InvalidArgument("generate: target_rate must lie in (0,1)");
  if (!(config.noise_std >= 0.0)) throw InvalidArgument("generate: noise_std must be >= 0");
  if (config.coefficients.size() != n_cols)
    throw InvalidArgument("generate: coefficient count must match schema");
  if (config.marginals.columns.size() != n_cols)
    throw InvalidArgument("generate: marginal count must match schema");

  std::vector<ColumnSampler> samplers;
  samplers.reserve(n_cols);
  for (const Marginal& m : config.marginals.columns) samplers.push_back(make_sampler(m));

  std::size_t n = config.n_rows;
  Dataset ds;
  ds.features = Matrix(n, n_cols);
  ds.target.assign(n, 0);
  ds.schema = schema;
  ds.provenance = {ProvenanceKind::Synthetic, "", config.seed};

  // Per-row threshold for the intercept: row i becomes positive exactly when
  // the calibrated intercept exceeds logit(u_i) - eta_i.
  std::vector<double> cutoff(n);
  parallel_for(n, [&](std::size_t i) {
    Rng rng(derive_seed(config.seed, "row", i));
    double eta = 0.0;
    for (std::size_t c = 0; c < n_cols; ++c) {
      double x = sample_column(samplers[c], rng);
      ds.features.at(i, c) = x;
      if (config.coefficients[c] != 0.0 && samplers[c].z_std > 0.0)
        eta += config.coefficients[c] * (x - samplers[c].z_mean) / samplers[c].z_std;
    }
    eta += config.noise_std * rng.normal();
    double u = rng.uniform();
    cutoff[i] = (u <= 0.0 ? -std::numeric_limits<double>::infinity()
                          : std::log(u / (1.0 - u))) -
                eta;
  });

  long long want = std::llround(static_cast<double>(n) * config.target_rate);
  if (want < 1 || want > static_cast<long long>(n) - 1)
    throw CalibrationError("target_rate unreachable: rounds to a single-class dataset");

  // The positive count is a step function of the intercept; solve the
  // monotone count equation exactly via order statistics.
  std::vector<double> sorted = cutoff;
  std::size_t m = static_cast<std::size_t>(want);
  std::nth_element(sorted.begin(), sorted.begin() + (m - 1), sorted.end());
  double below = sorted[m - 1];
  double above = *std::min_element(sorted.begin() + m, sorted.end());
  double intercept = below + 0.5 * (above - below);
  if (!(below < intercept && intercept < above))
    throw CalibrationError("intercept calibration failed: tied thresholds");

  for (std::size_t i = 0; i < n; ++i) ds.target[i] = cutoff[i] < intercept ? 1 : 0;
  return ds;
}

std::string to_json(const GeneratorConfig& config) {
  const FeatureSchema& schema = canonical_schema();
  nlohmann::json j;
  j["format_version"] = 1;
  j["n_rows"] = config.n_rows;
  j["target_rate"] = config.target_rate;
  j["noise_std"] = config.noise_std;
  j["seed"] = config.seed;
  nlohmann::json coef = nlohmann::json::object();
  for (std::size_t c = 0; c < config.coefficients.size(); ++c)
    coef[schema.columns[c].name] = config.coefficients[c];
  j["coefficients"] = coef;
  nlohmann::json marg = nlohmann::json::array();
  for (std::size_t c = 0; c < config.marginals.columns.size(); ++c) {
    const Marginal& m = config.marginals.columns[c];
    nlohmann::json jm;
    jm["name"] = schema.columns[c].name;
    jm["kind"] = kind_name(m.kind);
    switch (m.kind) {
      case ColumnKind::Binary:
        jm["p_one"] = m.p_one;
        break;
      case ColumnKind::Ordinal:
        jm["category_probs"] = m.category_probs;
        break;
      case ColumnKind::Continuous:
        jm["mean"] = m.mean;
        jm["stddev"] = m.stddev;
        jm["min"] = m.lo;
        jm["max"] = m.hi;
        jm["log_scale"] = m.log_scale;
        break;
    }
    marg.push_back(jm);
  }
  j["marginals"] = marg;
  return j.dump(2);
}

namespace {

GeneratorConfig generator_config_from_json_obj(const nlohmann::json& j) {
  const FeatureSchema& schema = canonical_schema();
  if (j.at("format_version").get<int>() != 1)
    throw ParseError("generator config: unsupported format_version");
  GeneratorConfig config;
  config.n_rows = j.at("n_rows").get<std::size_t>();
  config.target_rate = j.at("target_rate").get<double>();
  config.noise_std = j.at("noise_std").get<double>();
  config.seed = j.at("seed").get<std::uint64_t>();
  config.coefficients.assign(schema.columns.size(), 0.0);
  for (const auto& [name, value] : j.at("coefficients").items()) {
    int idx = schema.index_of(name);
    if (idx < 0) throw SchemaError("coefficient for unknown column \"" + name + "\"");
    config.coefficients[static_cast<std::size_t>(idx)] = value.get<double>();
  }
  config.marginals.columns.resize(schema.columns.size());
  std::vector<bool> seen(schema.columns.size(), false);
  for (const auto& jm : j.at("marginals")) {
    std::string name = jm.at("name").get<std::string>();
    int idx = schema.index_of(name);
    if (idx < 0) throw SchemaError("marginal for unknown column \"" + name + "\"");
    Marginal m;
    m.kind = kind_from_name(jm.at("kind").get<std::string>());
    switch (m.kind) {
      case ColumnKind::Binary:
        m.p_one = jm.at("p_one").get<double>();
        break;
      case ColumnKind::Ordinal:
        m.category_probs = jm.at("category_probs").get<std::vector<double>>();
        break;
      case ColumnKind::Continuous:
        m.mean = jm.at("mean").get<double>();
        m.stddev = jm.at("stddev").get<double>();
        m.lo = jm.at("min").get<double>();
        m.hi = jm.at("max").get<double>();
        m.log_scale = jm.value("log_scale", false);
        break;
    }
    config.marginals.columns[static_cast<std::size_t>(idx)] = m;
    seen[static_cast<std::size_t>(idx)] = true;
  }
  for (std::size_t c = 0; c < seen.size(); ++c)
    if (!seen[c]) throw SchemaError("missing marginal for column \"" + schema.columns[c].name + "\"");
  return config;
}

}  // namespace

GeneratorConfig generator_config_from_json(const std::string& text) {
  try {
    return generator_config_from_json_obj(nlohmann::json::parse(text));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("generator config: ") + e.what());
  }
}

}  // namespace subsetforge
