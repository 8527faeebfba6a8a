#include "subsetforge/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace subsetforge {

namespace {

std::string trim(const std::string& v) {
  std::size_t b = 0, e = v.size();
  while (b < e && (v[b] == ' ' || v[b] == '\t' || v[b] == '\r')) ++b;
  while (e > b && (v[e - 1] == ' ' || v[e - 1] == '\t' || v[e - 1] == '\r')) --e;
  return v.substr(b, e - b);
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      cells.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  cells.push_back(trim(cur));
  return cells;
}

double parse_cell(const std::string& cell, std::size_t row, const std::string& column) {
  if (cell.empty())
    throw ParseError("missing value at row " + std::to_string(row) + ", column \"" + column + "\"");
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last)
    throw ParseError("non-numeric value \"" + cell + "\" at row " + std::to_string(row) +
                     ", column \"" + column + "\"");
  return value;
}

void check_range(double value, const ColumnSpec& spec, std::size_t row) {
  if (!std::isfinite(value))
    throw RangeError("non-finite value at row " + std::to_string(row) + ", column \"" +
                     spec.name + "\"");
  switch (spec.kind) {
    case ColumnKind::Binary:
      if (value != 0.0 && value != 1.0)
        throw RangeError("binary column \"" + spec.name + "\" has value " +
                         std::to_string(value) + " at row " + std::to_string(row));
      break;
    case ColumnKind::Ordinal:
      if (value < spec.lo || value > spec.hi || value != std::floor(value))
        throw RangeError("ordinal column \"" + spec.name + "\" has value " +
                         std::to_string(value) + " at row " + std::to_string(row));
      break;
    case ColumnKind::Continuous:
      break;  // finiteness already checked
  }
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace

Dataset load_csv(const std::string& path, const FeatureSchema& schema) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open \"" + path + "\"");

  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    lines.push_back(line);
  }
  if (lines.empty()) throw ParseError("\"" + path + "\" has no header row");

  std::vector<std::string> header = split_line(lines[0]);
  std::size_t n_pred = schema.columns.size();
  // Input cell position of every schema column (-1 = absent), and the target.
  std::vector<int> position(n_pred, -1);
  int target_position = -1;
  Dataset ds;
  for (std::size_t i = 0; i < header.size(); ++i) {
    std::string machine = resolve_column_name(header[i]);
    if (machine.empty()) {
      ds.warnings.push_back("ignored unrecognized column \"" + header[i] + "\"");
      continue;
    }
    if (machine == schema.target.name) {
      if (target_position >= 0)
        throw SchemaError("duplicate column \"" + machine + "\"");
      target_position = static_cast<int>(i);
      continue;
    }
    int idx = schema.index_of(machine);
    if (idx < 0) {
      ds.warnings.push_back("ignored unrecognized column \"" + header[i] + "\"");
      continue;
    }
    if (position[static_cast<std::size_t>(idx)] >= 0)
      throw SchemaError("duplicate column \"" + machine + "\"");
    position[static_cast<std::size_t>(idx)] = static_cast<int>(i);
  }
  for (std::size_t c = 0; c < n_pred; ++c)
    if (position[c] < 0)
      throw SchemaError("missing required column \"" + schema.columns[c].name + "\"");
  if (target_position < 0)
    throw SchemaError("missing required column \"" + schema.target.name + "\"");

  std::size_t n_rows = lines.size() - 1;
  ds.features = Matrix(n_rows, n_pred);
  ds.target.resize(n_rows);
  ds.schema = schema;
  ds.provenance = {ProvenanceKind::Loaded, path, 0};

  for (std::size_t r = 0; r < n_rows; ++r) {
    std::vector<std::string> cells = split_line(lines[r + 1]);
    std::size_t row_no = r + 1;  // 1-based data row for messages
    if (cells.size() != header.size())
      throw ParseError("row " + std::to_string(row_no) + " has " +
                       std::to_string(cells.size()) + " cells, expected " +
                       std::to_string(header.size()));
    for (std::size_t c = 0; c < n_pred; ++c) {
      const ColumnSpec& spec = schema.columns[c];
      double value = parse_cell(cells[static_cast<std::size_t>(position[c])], row_no, spec.name);
      check_range(value, spec, row_no);
      ds.features.at(r, c) = value;
    }
    double t = parse_cell(cells[static_cast<std::size_t>(target_position)], row_no,
                          schema.target.name);
    if (t != 0.0 && t != 1.0)
      throw RangeError("target column \"" + schema.target.name + "\" has value " +
                       std::to_string(t) + " at row " + std::to_string(row_no));
    ds.target[r] = static_cast<int>(t);
  }
  return ds;
}

void save_csv(const Dataset& dataset, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write \"" + path + "\"");
  const FeatureSchema& schema = dataset.schema;
  for (const ColumnSpec& col : schema.columns) out << col.name << ',';
  out << schema.target.name << '\n';
  for (std::size_t r = 0; r < dataset.n_rows(); ++r) {
    for (std::size_t c = 0; c < schema.columns.size(); ++c)
      out << format_double(dataset.features.at(r, c)) << ',';
    out << dataset.target[r] << '\n';
  }
  if (!out) throw Error("write failed for \"" + path + "\"");
}

std::vector<std::size_t> ValidationReport::flagged_rows() const {
  std::set<std::size_t> rows;
  for (const Violation& v : violations) rows.insert(v.row);
  return {rows.begin(), rows.end()};
}

std::string ValidationReport::to_json_lines() const {
  std::ostringstream out;
  for (const Violation& v : violations) {
    nlohmann::json j;
    j["row"] = v.row;
    j["column"] = v.column;
    j["rule"] = v.rule;
    j["message"] = v.message;
    out << j.dump() << '\n';
  }
  return out.str();
}

ValidationReport validate(const Dataset& dataset) {
  ValidationReport report;
  const FeatureSchema& schema = dataset.schema;
  int nomo_idx = schema.index_of("NoMO");
  for (std::size_t r = 0; r < dataset.n_rows(); ++r) {
    std::size_t row_no = r + 1;
    for (std::size_t c = 0; c < schema.columns.size(); ++c) {
      const ColumnSpec& spec = schema.columns[c];
      double v = dataset.features.at(r, c);
      if (!std::isfinite(v)) {
        report.violations.push_back({row_no, spec.name, "non-finite",
                                     "value is not finite"});
        continue;
      }
      switch (spec.kind) {
        case ColumnKind::Binary:
          if (v != 0.0 && v != 1.0)
            report.violations.push_back({row_no, spec.name, "binary-range",
                                         "binary value " + format_double(v) +
                                             " outside {0,1}"});
          break;
        case ColumnKind::Ordinal:
          if (v < spec.lo || v > spec.hi || v != std::floor(v))
            report.violations.push_back({row_no, spec.name, "ordinal-range",
                                         "ordinal value " + format_double(v) +
                                             " outside " + format_double(spec.lo) + ".." +
                                             format_double(spec.hi)});
          break;
        case ColumnKind::Continuous:
          break;
      }
      if (static_cast<int>(c) == nomo_idx && v < 9.0)
        report.violations.push_back({row_no, spec.name, "nine-month-exclusion",
                                     "operating history below nine months (NoMO = " +
                                         format_double(v) + ")"});
    }
    int t = dataset.target[r];
    if (t != 0 && t != 1)
      report.violations.push_back({row_no, schema.target.name, "target-range",
                                   "target value " + std::to_string(t) + " outside {0,1}"});
  }
  return report;
}

Dataset drop_flagged(const Dataset& dataset, const ValidationReport& report) {
  std::set<std::size_t> flagged;
  for (const Violation& v : report.violations) flagged.insert(v.row);
  std::vector<int> keep;
  for (std::size_t r = 0; r < dataset.n_rows(); ++r)
    if (!flagged.count(r + 1)) keep.push_back(static_cast<int>(r));
  Dataset out;
  out.features = dataset.features.select_rows(keep);
  out.target.reserve(keep.size());
  for (int r : keep) out.target.push_back(dataset.target[static_cast<std::size_t>(r)]);
  out.schema = dataset.schema;
  out.provenance = dataset.provenance;
  out.warnings = dataset.warnings;
  return out;
}

namespace {

Dataset take_rows(const Dataset& dataset, const std::vector<int>& rows) {
  Dataset out;
  out.features = dataset.features.select_rows(rows);
  out.target.reserve(rows.size());
  for (int r : rows) out.target.push_back(dataset.target[static_cast<std::size_t>(r)]);
  out.schema = dataset.schema;
  out.provenance = dataset.provenance;
  return out;
}

}  // namespace

SplitPair stratified_split(const Dataset& dataset, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw InvalidArgument("test_fraction must lie in (0,1)");
  std::vector<int> pos, neg;
  for (std::size_t r = 0; r < dataset.n_rows(); ++r)
    (dataset.target[r] == 1 ? pos : neg).push_back(static_cast<int>(r));
  if (pos.empty() || neg.empty())
    throw InvalidArgument("stratified_split requires both classes");
  if (pos.size() < 2 || neg.size() < 2)
    throw InvalidArgument("stratified_split requires at least 2 rows per class");

  std::vector<int> train_rows, test_rows;
  int cls = 0;
  for (std::vector<int>* members : {&pos, &neg}) {
    Rng rng(derive_seed(seed, "stratified_split", static_cast<std::uint64_t>(cls++)));
    rng.shuffle(*members);
    double exact = static_cast<double>(members->size()) * test_fraction;
    long long want = static_cast<long long>(std::floor(exact + 0.5));  // half-up
    long long max_test = static_cast<long long>(members->size()) - 1;
    long long n_test = std::clamp(want, 1LL, max_test);
    for (std::size_t i = 0; i < members->size(); ++i)
      (static_cast<long long>(i) < n_test ? test_rows : train_rows)
          .push_back((*members)[i]);
  }
  std::sort(train_rows.begin(), train_rows.end());
  std::sort(test_rows.begin(), test_rows.end());

  SplitPair split;
  split.train = take_rows(dataset, train_rows);
  split.test = take_rows(dataset, test_rows);
  split.test_fraction = test_fraction;
  split.seed = seed;
  return split;
}

StandardizeResult standardize(const Dataset& train, const Dataset& test) {
  if (train.schema != test.schema)
    throw InvalidArgument("standardize: train and test schemas differ");
  StandardizeResult result{train, test, {}};
  const FeatureSchema& schema = train.schema;
  std::size_t n = train.n_rows();
  if (n == 0) throw InvalidArgument("standardize: empty training data");

  for (std::size_t c = 0; c < schema.columns.size(); ++c) {
    const ColumnSpec& spec = schema.columns[c];
    ColumnTransform t{spec.name, false, 0.0, 1.0};
    if (spec.kind != ColumnKind::Binary) {
      double mean = 0.0;
      for (std::size_t r = 0; r < n; ++r) mean += train.features.at(r, c);
      mean /= static_cast<double>(n);
      double var = 0.0;
      for (std::size_t r = 0; r < n; ++r) {
        double d = train.features.at(r, c) - mean;
        var += d * d;
      }
      double stddev = std::sqrt(var / static_cast<double>(n));
      if (stddev > 0.0) {
        t.applied = true;
        t.mean = mean;
        t.stddev = stddev;
        for (std::size_t r = 0; r < n; ++r)
          result.train.features.at(r, c) = (train.features.at(r, c) - mean) / stddev;
        for (std::size_t r = 0; r < test.n_rows(); ++r)
          result.test.features.at(r, c) = (test.features.at(r, c) - mean) / stddev;
      }
    }
    result.record.columns.push_back(t);
  }
  return result;
}

void apply_transform(Matrix& features, const TransformRecord& record) {
  if (features.cols != record.columns.size())
    throw InvalidArgument("apply_transform: column count mismatch");
  for (std::size_t c = 0; c < record.columns.size(); ++c) {
    const ColumnTransform& t = record.columns[c];
    if (!t.applied) continue;
    for (std::size_t r = 0; r < features.rows; ++r)
      features.at(r, c) = (features.at(r, c) - t.mean) / t.stddev;
  }
}

}  // namespace subsetforge
