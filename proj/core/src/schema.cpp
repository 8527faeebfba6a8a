#include "subsetforge/schema.hpp"

#include <algorithm>
#include <cctype>
#include <limits>

namespace subsetforge {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ColumnSpec continuous(std::string name) { return {std::move(name), ColumnKind::Continuous, -kInf, kInf}; }
ColumnSpec binary(std::string name) { return {std::move(name), ColumnKind::Binary, 0.0, 1.0}; }
ColumnSpec ordinal(std::string name, double lo, double hi) {
  return {std::move(name), ColumnKind::Ordinal, lo, hi};
}

FeatureSchema build_schema() {
  FeatureSchema s;
  s.columns = {
      continuous("NoMO"),
      ordinal("Geographical Location", 1.0, 5.0),
      continuous("Registered Capital"),
      binary("NE"),
      binary("Auto Bidding"),
      binary("Car Loan"),
      binary("Personal Credit Loan"),
      binary("Business Credit Loan"),
      binary("Other Loans"),
      binary("Multiple Loans"),
      binary("Borrow Fee"),
      binary("Top-up Fee"),
      binary("Withdrawal Fee"),
      continuous("AIR"),
      binary("Third-party Guarantee"),
      binary("Bank Guarantee"),
      binary("Risk Reserve"),
      binary("CAPM"),
      binary("Financing Guarantee"),
      binary("BDM"),
      binary("Other Guarantee"),
      binary("No Guarantee"),
      binary("NIFA Membership"),
      binary("AVCA"),
      binary("TCA"),
      binary("Listed Company"),
      binary("Company License"),
      binary("Operation Permit"),
      binary("No Supervisory Mechanism"),
  };
  s.target = binary("Operating Status");
  return s;
}

std::string trim(std::string_view v) {
  std::size_t b = 0, e = v.size();
  while (b < e && std::isspace(static_cast<unsigned char>(v[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(v[e - 1]))) --e;
  return std::string(v.substr(b, e - b));
}

}  // namespace

int FeatureSchema::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i].name == name) return static_cast<int>(i);
  return -1;
}

const FeatureSchema& canonical_schema() {
  static const FeatureSchema schema = build_schema();
  return schema;
}

const std::vector<std::pair<std::string, std::string>>& column_name_aliases() {
  static const std::vector<std::pair<std::string, std::string>> aliases = {
      {"Number of Months of Operation (NoMO)", "NoMO"},
      {"Number of Months of Operation", "NoMO"},
      {"Non-state-run Enterprise (NE)", "NE"},
      {"Non-state-run Enterprise", "NE"},
      {"Average Interest Rate (AIR)", "AIR"},
      {"Average Interest Rate", "AIR"},
      {"Capital Advance Processing Mechanism (CAPM)", "CAPM"},
      {"Capital Advance Processing Mechanism", "CAPM"},
      {"Bank Deposit Management (BDM)", "BDM"},
      {"Bank Deposit Management", "BDM"},
      {"Acceptance of Venture Capital Assessment (AVCA)", "AVCA"},
      {"Acceptance of Venture Capital Assessment", "AVCA"},
      {"Acceptance Venture Capital Assessment (AVCA)", "AVCA"},
      {"Third-party Credit Assessment (TCA)", "TCA"},
      {"Third-party Credit Assessment", "TCA"},
      {"Other Guarantees", "Other Guarantee"},
      {"No Supervision Mechanism", "No Supervisory Mechanism"},
      {"Target Variable: Operating Status", "Operating Status"},
  };
  return aliases;
}

std::string resolve_column_name(std::string_view header) {
  std::string h = trim(header);
  const FeatureSchema& s = canonical_schema();
  if (s.index_of(h) >= 0 || h == s.target.name) return h;
  for (const auto& [longname, machine] : column_name_aliases())
    if (h == longname) return machine;
  return {};
}

}  // namespace subsetforge
