#include "subsetforge/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>

namespace subsetforge {

namespace {

std::string csv_escape(const std::string& cell) {
  if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

std::string format_value(double value, int decimals) {
  char buf[64];
  std::to_chars_result res =
      decimals < 0 ? std::to_chars(buf, buf + sizeof buf, value)
                   : std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed,
                                   decimals);
  return std::string(buf, res.ptr);
}

std::string join_names(const std::vector<std::string>& names) {
  std::string out;
  for (const std::string& name : names) {
    if (!out.empty()) out += ", ";
    out += name;
  }
  return out;
}

}  // namespace

std::string format_3dp(double value) {
  if (!std::isfinite(value)) throw InvalidArgument("format_3dp: non-finite value");
  bool negative = value < 0;
  auto scaled = static_cast<long long>(std::floor(std::fabs(value) * 1000.0 + 0.5));
  std::string out = negative && scaled != 0 ? "-" : "";
  out += std::to_string(scaled / 1000);
  out += '.';
  std::string frac = std::to_string(scaled % 1000);
  out.append(3 - frac.size(), '0');
  out += frac;
  return out;
}

std::string ReportTable::to_markdown() const {
  std::vector<std::string> headers;
  headers.push_back("Metric");
  headers.insert(headers.end(), column_labels.begin(), column_labels.end());
  std::vector<std::size_t> widths(headers.size());
  for (std::size_t c = 0; c < headers.size(); ++c) widths[c] = headers[c].size();
  for (std::size_t r = 0; r < row_labels.size(); ++r) {
    widths[0] = std::max(widths[0], row_labels[r].size());
    for (std::size_t c = 0; c < column_labels.size(); ++c)
      widths[c + 1] = std::max(widths[c + 1], cells[r][c].size());
  }
  auto pad = [](const std::string& s, std::size_t w) {
    return s + std::string(w - s.size(), ' ');
  };
  std::string out;
  out += "|";
  for (std::size_t c = 0; c < headers.size(); ++c) out += " " + pad(headers[c], widths[c]) + " |";
  out += "\n|";
  for (std::size_t c = 0; c < headers.size(); ++c) out += " " + std::string(widths[c], '-') + " |";
  out += "\n";
  for (std::size_t r = 0; r < row_labels.size(); ++r) {
    out += "| " + pad(row_labels[r], widths[0]) + " |";
    for (std::size_t c = 0; c < column_labels.size(); ++c)
      out += " " + pad(cells[r][c], widths[c + 1]) + " |";
    out += "\n";
  }
  return out;
}

std::string ReportTable::to_csv() const {
  std::string out = "Metric";
  for (const std::string& label : column_labels) out += "," + csv_escape(label);
  out += "\n";
  for (std::size_t r = 0; r < row_labels.size(); ++r) {
    out += csv_escape(row_labels[r]);
    for (const std::string& cell : cells[r]) out += "," + csv_escape(cell);
    out += "\n";
  }
  return out;
}

ReportTable emit_wrapper_table(const std::vector<ProtocolReport>& reports) {
  std::map<LearnerKind, const ProtocolReport*> by_kind;
  for (const ProtocolReport& r : reports)
    if (!by_kind.emplace(r.kind, &r).second)
      throw InvalidArgument("wrapper table: duplicate kind " + kind_name(r.kind));

  std::vector<std::string> missing;
  for (LearnerKind kind : all_learner_kinds())
    if (by_kind.find(kind) == by_kind.end()) missing.push_back(kind_display_name(kind));
  if (!missing.empty())
    throw InvalidArgument("wrapper table: missing reports for: " + join_names(missing));

  const ProtocolReport& first = reports.front();
  for (const ProtocolReport& r : reports)
    if (r.method.name() != first.method.name() ||
        r.method.tolerance_or_k() != first.method.tolerance_or_k())
      throw InvalidArgument("wrapper table: reports mix selection methods");

  ReportTable table;
  table.row_labels = {"Accuracy", "Precision", "Recall", "F1 Score",
                      "FAR",      "AUC",       "Feature Size", "Feature Subset"};
  table.cells.assign(table.row_labels.size(), {});
  for (LearnerKind kind : all_learner_kinds()) {
    table.column_labels.push_back(kind_display_name(kind));
    const ProtocolReport& r = *by_kind.at(kind);
    const MetricsBundle& m = r.test_metrics;
    table.cells[0].push_back(format_3dp(m.accuracy));
    table.cells[1].push_back(format_3dp(m.precision));
    table.cells[2].push_back(format_3dp(m.recall));
    table.cells[3].push_back(format_3dp(m.f1));
    table.cells[4].push_back(format_3dp(m.far));
    table.cells[5].push_back(m.auc ? format_3dp(*m.auc) : "n/a");
    table.cells[6].push_back(std::to_string(r.subset.names.size()));
    table.cells[7].push_back(join_names(r.subset.names));
  }
  return table;
}

std::string FigureSeries::to_csv() const {
  for (const Series& s : series)
    if (s.values.size() != x.size())
      throw InvalidArgument("figure series: length mismatch in '" + s.label + "'");
  std::string out = csv_escape(x_label);
  for (const Series& s : series)
    out += "," + csv_escape(s.right_axis ? s.label + "_right_axis" : s.label);
  out += "\n";
  for (std::size_t i = 0; i < x.size(); ++i) {
    out += csv_escape(x[i]);
    for (const Series& s : series) out += "," + format_value(s.values[i], s.decimals);
    out += "\n";
  }
  return out;
}

FigureSeries emit_ranking_series(const RankedFeatures& ranked) {
  FigureSeries fig;
  fig.name = ranked.direction == RankOrder::Descending ? "ranking_desc" : "ranking_asc";
  fig.x_label = "feature";
  FigureSeries::Series rho{"rho", {}, false, 4};
  FigureSeries::Series rank{"rank", {}, false, 0};
  std::size_t n = ranked.order.size();
  for (std::size_t i = 0; i < n; ++i) {
    const RankedFeature& f = ranked.order[i];
    fig.x.push_back(f.name);
    rho.values.push_back(f.spearman);
    rank.values.push_back(ranked.direction == RankOrder::Descending
                              ? static_cast<double>(i + 1)
                              : static_cast<double>(n - i));
  }
  fig.series = {std::move(rho), std::move(rank)};
  return fig;
}

FigureSeries emit_sweep_series(const std::vector<SweepRow>& rows) {
  if (rows.empty()) throw InvalidArgument("sweep series: no rows");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    int prev = rows[i - 1].feature_count;
    int cur = rows[i].feature_count;
    if (cur <= prev)
      throw InvalidArgument("sweep series: rows not sorted by feature count");
    if (cur != prev + 1)
      throw InvalidArgument("sweep series: gap in feature counts at " +
                            std::to_string(prev + 1));
  }
  FigureSeries fig;
  fig.name = "sweep";
  fig.x_label = "feature_count";
  auto named = [](const char* label) {
    FigureSeries::Series s;
    s.label = label;
    return s;
  };
  FigureSeries::Series acc = named("accuracy");
  FigureSeries::Series rec = named("recall");
  FigureSeries::Series f1 = named("f1");
  FigureSeries::Series auc = named("auc");
  FigureSeries::Series far = named("far");
  far.right_axis = true;
  for (const SweepRow& row : rows) {
    fig.x.push_back(std::to_string(row.feature_count));
    acc.values.push_back(row.avg_accuracy);
    rec.values.push_back(row.avg_recall);
    f1.values.push_back(row.avg_f1);
    auc.values.push_back(row.avg_auc);
    far.values.push_back(row.avg_far);
  }
  fig.series = {std::move(acc), std::move(rec), std::move(f1), std::move(auc), std::move(far)};
  return fig;
}

}  // namespace subsetforge
