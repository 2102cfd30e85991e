#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "fecm/data/panel.hpp"
#include "fecm/error.hpp"

namespace fecm {

/// What a transformation consumed, enough to invert it.
struct TransformRecord {
  TransformCode tc = TransformCode::Level;
  bool log_applied = false;
  /// Leading observations in original (unlogged) units; 0, 1 or 2 of them.
  std::vector<double> original_first_values;
};

struct Transformed {
  std::vector<double> values;
  TransformRecord record;
};

namespace detail {

inline std::vector<double> checked_log(std::span<const double> y, const std::string& name) {
  std::vector<double> out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!(y[i] > 0.0))
      throw DomainError("log transform of non-positive value " + std::to_string(y[i]) + " in series '" +
                        name + "' at index " + std::to_string(i));
    out[i] = std::log(y[i]);
  }
  return out;
}

inline std::vector<double> difference(const std::vector<double>& y) {
  std::vector<double> d;
  if (y.size() < 2) return d;
  d.reserve(y.size() - 1);
  for (std::size_t i = 1; i < y.size(); ++i) d.push_back(y[i] - y[i - 1]);
  return d;
}

}  // namespace detail

/// Applies transformation code `tc`. Output length is T, T-1 or T-2.
inline Transformed apply_transformation(std::span<const double> series, TransformCode tc,
                                        const std::string& name = "series") {
  if (series.size() < 3)
    throw ContractError("apply_transformation: series '" + name + "' needs at least 3 observations");
  Transformed out;
  out.record.tc = tc;
  out.record.log_applied = is_log_code(tc);
  const int consumed = consumed_observations(tc);
  out.record.original_first_values.assign(series.begin(), series.begin() + consumed);

  std::vector<double> base = out.record.log_applied ? detail::checked_log(series, name)
                                                    : std::vector<double>(series.begin(), series.end());
  for (int k = 0; k < consumed; ++k) base = detail::difference(base);
  out.values = std::move(base);
  return out;
}

/// Rebuilds levels from transformed values. `last_levels` are the original
/// observations immediately preceding `diffs` (as many as the code consumes).
inline std::vector<double> invert_transformation(std::span<const double> last_levels,
                                                 std::span<const double> diffs,
                                                 const TransformRecord& record) {
  const int consumed = consumed_observations(record.tc);
  if (static_cast<int>(last_levels.size()) != consumed)
    throw ContractError("invert_transformation: code " + std::to_string(to_int(record.tc)) + " needs " +
                        std::to_string(consumed) + " preceding levels, got " +
                        std::to_string(last_levels.size()));
  if (record.log_applied != is_log_code(record.tc))
    throw ContractError("invert_transformation: record log flag does not match its code");

  std::vector<double> anchor(last_levels.begin(), last_levels.end());
  if (record.log_applied) anchor = detail::checked_log(anchor, "last_levels");

  std::vector<double> out(diffs.size());
  if (consumed == 0) {
    for (std::size_t i = 0; i < diffs.size(); ++i) out[i] = diffs[i];
  } else if (consumed == 1) {
    double level = anchor[0];
    for (std::size_t i = 0; i < diffs.size(); ++i) {
      level += diffs[i];
      out[i] = level;
    }
  } else {
    double level = anchor[1];
    double slope = anchor[1] - anchor[0];
    for (std::size_t i = 0; i < diffs.size(); ++i) {
      slope += diffs[i];
      level += slope;
      out[i] = level;
    }
  }
  if (record.log_applied)
    for (double& v : out) v = std::exp(v);
  return out;
}

/// Running sum: out[t] = sum of in[0..t].
inline std::vector<double> cumulate(std::span<const double> series) {
  std::vector<double> out(series.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    acc += series[i];
    out[i] = acc;
  }
  return out;
}

inline std::vector<double> column_vector(const Matrix& m, Index j) {
  std::vector<double> v(static_cast<std::size_t>(m.rows()));
  for (Index t = 0; t < m.rows(); ++t) v[static_cast<std::size_t>(t)] = m(t, j);
  return v;
}

}  // namespace fecm
