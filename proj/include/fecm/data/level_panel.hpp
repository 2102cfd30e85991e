#pragma once

#include <string>
#include <vector>

#include "fecm/data/outliers.hpp"
#include "fecm/data/panel.hpp"
#include "fecm/data/transform.hpp"
#include "fecm/stats.hpp"

namespace fecm {

/// Whether a series is modelled in logs: logs are taken for every series
/// whose transformation code is logarithmic, except interest rates.
inline bool uses_log_levels(const SeriesMeta& m) { return !m.is_interest_rate && is_log_code(m.tc); }

/// Panel of I(1)-like columns: I(1) series in (log-)levels, I(0) series
/// cumulated.
inline Panel build_level_panel(const Panel& panel) {
  panel.validate();
  Panel out = panel;
  for (Index j = 0; j < panel.cols(); ++j) {
    const SeriesMeta& m = panel.meta[static_cast<std::size_t>(j)];
    if (!m.integration_order)
      throw ConfigError("series '" + m.mnemonic + "' has no integration order");
    std::vector<double> col = column_vector(panel.values, j);
    if (uses_log_levels(m)) col = detail::checked_log(col, m.mnemonic);
    if (*m.integration_order == IntegrationOrder::I0) col = cumulate(col);
    for (Index t = 0; t < panel.rows(); ++t) out.values(t, j) = col[static_cast<std::size_t>(t)];
  }
  return out;
}

struct OutlierLogEntry {
  std::string mnemonic;
  std::size_t index = 0;  // row in the transformed series
  double original = 0.0;
  double replacement = 0.0;
};

/// Level panel and its first differences after outlier screening. The screen
/// runs on the differenced (stationary) columns; cleaned levels are the first
/// level plus the running sum of cleaned differences.
struct PreparedSample {
  Panel levels;  // T rows
  Matrix diffs;  // T-1 rows
  std::vector<OutlierLogEntry> outliers;
};

inline PreparedSample prepare_sample(const Panel& raw, bool screen_outliers = true) {
  PreparedSample out;
  const Panel levels = build_level_panel(raw);
  out.diffs = diff_rows(levels.values);
  out.levels = levels;
  if (!screen_outliers || out.diffs.rows() < 6) return out;
  for (Index j = 0; j < out.diffs.cols(); ++j) {
    const std::vector<double> col = column_vector(out.diffs, j);
    OutlierResult res = replace_outliers(col);
    if (res.outlier_indices.empty()) continue;
    for (std::size_t i : res.outlier_indices)
      out.outliers.push_back({raw.meta[static_cast<std::size_t>(j)].mnemonic, i + 1, col[i], res.cleaned[i]});
    double level = levels.values(0, j);
    for (Index t = 0; t < out.diffs.rows(); ++t) {
      out.diffs(t, j) = res.cleaned[static_cast<std::size_t>(t)];
      level += out.diffs(t, j);
      out.levels.values(t + 1, j) = level;
    }
  }
  return out;
}

/// Advisory seasonality screen on the differenced level panel. Returns the
/// mnemonics whose quarterly dummies are jointly significant at 5%. Data are
/// never modified.
inline std::vector<std::string> seasonality_warnings(const Panel& raw) {
  std::vector<std::string> flagged;
  const Panel levels = build_level_panel(raw);
  const Matrix d = diff_rows(levels.values);
  if (d.rows() < 8) return flagged;
  std::vector<int> quarters;
  for (std::size_t t = 1; t < raw.time_index.size(); ++t) quarters.push_back(raw.time_index[t].quarter);
  for (Index j = 0; j < d.cols(); ++j) {
    const std::vector<double> col = column_vector(d, j);
    if (stats::quarterly_dummy_ftest(col, quarters).seasonal_at_5pct())
      flagged.push_back(raw.meta[static_cast<std::size_t>(j)].mnemonic);
  }
  return flagged;
}

}  // namespace fecm
