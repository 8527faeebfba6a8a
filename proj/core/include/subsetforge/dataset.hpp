#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "subsetforge/common.hpp"
#include "subsetforge/schema.hpp"

namespace subsetforge {

enum class ProvenanceKind { Loaded, Synthetic };

struct Provenance {
  ProvenanceKind kind = ProvenanceKind::Loaded;
  std::string path;         // for loaded data
  std::uint64_t seed = 0;   // for synthetic data

  bool operator==(const Provenance&) const = default;
};

struct Dataset {
  Matrix features;  // n_rows x schema.columns.size()
  std::vector<int> target;
  FeatureSchema schema;
  Provenance provenance;
  std::vector<std::string> warnings;  // e.g. ignored extra CSV columns

  std::size_t n_rows() const { return features.rows; }
};

// Reads a UTF-8 comma-separated file with a header row. Headers may use the
// long column spellings (see column_name_aliases); columns are reordered to
// schema order; unrecognized columns are ignored with a warning.
Dataset load_csv(const std::string& path, const FeatureSchema& schema);

// Machine-name header plus one row per observation; doubles are written in
// shortest round-trip form, so save followed by load reproduces the data.
void save_csv(const Dataset& dataset, const std::string& path);

struct Violation {
  std::size_t row = 0;  // 1-based data row
  std::string column;
  std::string rule;
  std::string message;

  bool operator==(const Violation&) const = default;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  std::vector<std::size_t> flagged_rows() const;  // sorted, deduplicated
  std::string to_json_lines() const;
};

// Soft checks: the nine-month operating-history rule (NoMO >= 9), binary
// cells outside {0,1}, ordinal cells outside their range, non-finite values,
// and target labels outside {0,1}. Violations are data, not failures.
ValidationReport validate(const Dataset& dataset);

// Copy of the dataset with every flagged row removed.
Dataset drop_flagged(const Dataset& dataset, const ValidationReport& report);

struct SplitPair {
  Dataset train;
  Dataset test;
  double test_fraction = 0.0;
  std::uint64_t seed = 0;
};

// Per-class sampling so both sides preserve the class balance to within one
// row per class; each class must have at least 2 members.
SplitPair stratified_split(const Dataset& dataset, double test_fraction, std::uint64_t seed);

struct ColumnTransform {
  std::string name;
  bool applied = false;  // false: passed through (binary or zero variance)
  double mean = 0.0;
  double stddev = 1.0;

  bool operator==(const ColumnTransform&) const = default;
};

struct TransformRecord {
  std::vector<ColumnTransform> columns;

  bool operator==(const TransformRecord&) const = default;
};

struct StandardizeResult {
  Dataset train;
  Dataset test;
  TransformRecord record;
};

// Z-scores continuous and ordinal columns using train statistics only;
// binary columns and zero-variance columns pass through untouched.
StandardizeResult standardize(const Dataset& train, const Dataset& test);

// Applies a stored transform to a feature matrix in schema column order.
void apply_transform(Matrix& features, const TransformRecord& record);

}  // namespace subsetforge
