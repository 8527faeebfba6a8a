#pragma once

#include <string>
#include <vector>

#include "subsetforge/selection.hpp"

namespace subsetforge {

// Fixed three-decimal rendering with half-up ties: 0.9 -> "0.900",
// 0.0695 -> per the stored double, not the decimal literal. Throws on
// non-finite input. Every table cell goes through this so rendered
// values parse back to the same 3-decimal quantity.
std::string format_3dp(double value);

// A rendered metrics table: one column per model, fixed metric rows.
// Cells are already formatted strings so rendering is a pure layout step.
struct ReportTable {
  std::vector<std::string> row_labels;
  std::vector<std::string> column_labels;
  std::vector<std::vector<std::string>> cells;  // cells[row][column]

  std::string to_markdown() const;  // aligned pipe table
  std::string to_csv() const;
};

// Builds the six-model comparison table (rows: Accuracy, Precision, Recall,
// F1 Score, FAR, AUC, Feature Size, Feature Subset; columns: LR, SVM, RF,
// ANN, XGBoost, SBEL) from one protocol report per kind. Errors if a kind is
// missing or duplicated, or if the reports mix selection methods.
ReportTable emit_wrapper_table(const std::vector<ProtocolReport>& reports);

// Plot-data container: an x column plus named y-series of equal length.
// A series flagged right_axis renders with a "_right_axis" suffix on its
// CSV header so downstream plotting knows to put it on the second axis.
struct FigureSeries {
  struct Series {
    std::string label;
    std::vector<double> values;
    bool right_axis = false;
    int decimals = -1;  // -1: shortest round-trip formatting
  };

  std::string name;
  std::string x_label;
  std::vector<std::string> x;
  std::vector<Series> series;

  std::string to_csv() const;
};

// Ranking bars: feature name, signed Spearman rho (4 decimals), |rho| rank.
FigureSeries emit_ranking_series(const RankedFeatures& ranked);

// Sweep curves: per feature count the five cross-model averages, FAR on the
// right axis. Rows must be sorted by feature_count with no gaps.
FigureSeries emit_sweep_series(const std::vector<SweepRow>& rows);

}  // namespace subsetforge
