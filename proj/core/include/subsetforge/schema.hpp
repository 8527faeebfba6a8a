#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace subsetforge {

enum class ColumnKind { Continuous, Binary, Ordinal };

struct ColumnSpec {
  std::string name;
  ColumnKind kind = ColumnKind::Continuous;
  // Inclusive load-time bounds; continuous columns only require finiteness.
  double lo = 0.0;
  double hi = 0.0;

  bool operator==(const ColumnSpec&) const = default;
};

struct FeatureSchema {
  std::vector<ColumnSpec> columns;  // the 29 predictors, fixed order
  ColumnSpec target;

  // Index into columns, or -1 when the name is not a predictor.
  int index_of(std::string_view name) const;

  bool operator==(const FeatureSchema&) const = default;
};

// The fixed 29-predictor schema plus the binary "Operating Status" target
// (1 = operating/survival, 0 = problematic).
const FeatureSchema& canonical_schema();

// Long-form header spellings accepted on CSV input, mapped to machine names.
const std::vector<std::pair<std::string, std::string>>& column_name_aliases();

// Machine name for a header cell (machine names resolve to themselves);
// empty string when the header is not recognized.
std::string resolve_column_name(std::string_view header);

}  // namespace subsetforge
