#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "fecm/error.hpp"
#include "fecm/stats.hpp"

namespace fecm {

struct OutlierResult {
  std::vector<double> cleaned;
  std::vector<std::size_t> outlier_indices;  // 0-based, ascending
};

/// Observations further than `iqr_multiple` interquartile ranges from the
/// sample median are replaced by the median of the (already cleaned) five
/// preceding observations. Near the start fewer predecessors are used; an
/// outlier in the first position takes the median of the rest of the series.
inline OutlierResult replace_outliers(std::span<const double> series, double iqr_multiple = 6.0,
                                      std::size_t window = 5) {
  if (series.size() < 6) throw ContractError("replace_outliers: series needs at least 6 observations");
  const double center = stats::median(series);
  const double spread = stats::iqr(series);
  const double bound = iqr_multiple * spread;

  OutlierResult out;
  out.cleaned.assign(series.begin(), series.end());
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (!(std::abs(series[i] - center) > bound)) continue;
    out.outlier_indices.push_back(i);
    if (i == 0) {
      out.cleaned[0] = stats::median(series.subspan(1));
    } else {
      const std::size_t from = i >= window ? i - window : 0;
      out.cleaned[i] = stats::median(std::span<const double>(out.cleaned).subspan(from, i - from));
    }
  }
  return out;
}

}  // namespace fecm
