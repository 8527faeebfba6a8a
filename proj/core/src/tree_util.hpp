#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "subsetforge/common.hpp"

namespace subsetforge::detail {

// Feature values quantized to per-column bins so split search scans bin
// histograms instead of sorted rows. thresholds[c] holds ascending cut
// points (midpoints of adjacent distinct values); code = index of the first
// cut point >= x, i.e. splitting at bin b means "x <= thresholds[c][b]".
struct BinnedFeatures {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint8_t> codes;                 // rows * cols
  std::vector<std::vector<double>> thresholds;     // per column

  std::uint8_t code(std::size_t r, std::size_t c) const { return codes[r * cols + c]; }
  std::size_t bin_count(std::size_t c) const { return thresholds[c].size() + 1; }
};

inline BinnedFeatures bin_features(const Matrix& features, std::size_t max_bins) {
  BinnedFeatures out;
  out.rows = features.rows;
  out.cols = features.cols;
  out.codes.resize(features.rows * features.cols);
  out.thresholds.resize(features.cols);
  std::vector<double> sorted(features.rows);
  for (std::size_t c = 0; c < features.cols; ++c) {
    for (std::size_t r = 0; r < features.rows; ++r) sorted[r] = features.at(r, c);
    std::sort(sorted.begin(), sorted.end());

    std::vector<double> candidates;
    std::size_t distinct = 0;
    for (std::size_t r = 0; r < sorted.size(); ++r)
      if (r == 0 || sorted[r] != sorted[r - 1]) ++distinct;
    if (distinct <= max_bins) {
      for (std::size_t r = 0; r < sorted.size(); ++r)
        if (r == 0 || sorted[r] != sorted[r - 1]) candidates.push_back(sorted[r]);
    } else {
      for (std::size_t b = 0; b < max_bins; ++b) {
        double v = sorted[(b * (sorted.size() - 1)) / (max_bins - 1)];
        if (candidates.empty() || v != candidates.back()) candidates.push_back(v);
      }
    }
    std::vector<double>& cuts = out.thresholds[c];
    for (std::size_t i = 0; i + 1 < candidates.size(); ++i)
      cuts.push_back(candidates[i] + 0.5 * (candidates[i + 1] - candidates[i]));

    for (std::size_t r = 0; r < features.rows; ++r) {
      double x = features.at(r, c);
      std::size_t code = static_cast<std::size_t>(
          std::lower_bound(cuts.begin(), cuts.end(), x) - cuts.begin());
      out.codes[r * features.cols + c] = static_cast<std::uint8_t>(code);
    }
  }
  return out;
}

// k distinct indices from 0..total-1 by partial Fisher-Yates, ascending.
inline std::vector<int> sample_features(std::size_t total, std::size_t k, Rng& rng) {
  std::vector<int> all(total);
  for (std::size_t i = 0; i < total; ++i) all[i] = static_cast<int>(i);
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t j = i + static_cast<std::size_t>(rng.uniform_int(
                            0, static_cast<long long>(total - i) - 1));
    std::swap(all[i], all[j]);
  }
  all.resize(k);
  std::sort(all.begin(), all.end());
  return all;
}

}  // namespace subsetforge::detail
