#pragma once

#include <cmath>
#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "fecm/error.hpp"
#include "fecm/linalg.hpp"

namespace fecm {

/// Transformation code applied to render a series stationary.
enum class TransformCode : int {
  Level = 1,          // x = y
  Diff = 2,           // x = dy
  Diff2 = 3,          // x = d2y
  Log = 4,            // x = log y
  DiffLog = 5,        // x = dlog y
  Diff2Log = 6,       // x = d2log y
};

inline TransformCode transform_code_from_int(int tc) {
  if (tc < 1 || tc > 6) throw ConfigError("transformation code must be in 1..6, got " + std::to_string(tc));
  return static_cast<TransformCode>(tc);
}

inline int to_int(TransformCode tc) { return static_cast<int>(tc); }

/// Number of leading observations a code consumes.
inline int consumed_observations(TransformCode tc) {
  switch (tc) {
    case TransformCode::Level:
    case TransformCode::Log: return 0;
    case TransformCode::Diff:
    case TransformCode::DiffLog: return 1;
    case TransformCode::Diff2:
    case TransformCode::Diff2Log: return 2;
  }
  return 0;
}

inline bool is_log_code(TransformCode tc) {
  return tc == TransformCode::Log || tc == TransformCode::DiffLog || tc == TransformCode::Diff2Log;
}

enum class IntegrationOrder { I0, I1 };

struct SeriesMeta {
  int id = 0;
  std::string mnemonic;
  std::string description;
  TransformCode tc = TransformCode::Level;
  bool is_interest_rate = false;
  std::optional<IntegrationOrder> integration_order;
};

/// Calendar quarter. Ordered chronologically.
struct Quarter {
  int year = 0;
  int quarter = 1;  // 1..4

  int ordinal() const { return year * 4 + (quarter - 1); }
  static Quarter from_ordinal(int o) {
    const int y = o >= 0 ? o / 4 : -((-o + 3) / 4);
    return Quarter{y, o - y * 4 + 1};
  }
  Quarter plus(int quarters) const { return from_ordinal(ordinal() + quarters); }

  /// Parses `YYYYQn` (also accepts `YYYY:Qn` and `YYYY-Qn`).
  static Quarter parse(const std::string& text) {
    std::string s;
    for (char c : text)
      if (c != ' ' && c != ':' && c != '-' && c != '\r') s.push_back(c);
    const auto qpos = s.find_first_of("Qq");
    if (qpos == std::string::npos || qpos == 0 || qpos + 2 != s.size())
      throw ConfigError("bad quarter date '" + text + "', expected YYYYQn");
    Quarter q;
    try {
      q.year = std::stoi(s.substr(0, qpos));
    } catch (const std::exception&) {
      throw ConfigError("bad quarter date '" + text + "', expected YYYYQn");
    }
    q.quarter = s[qpos + 1] - '0';
    if (q.quarter < 1 || q.quarter > 4) throw ConfigError("bad quarter in date '" + text + "'");
    return q;
  }

  std::string to_string() const { return std::to_string(year) + "Q" + std::to_string(quarter); }

  friend bool operator==(const Quarter&, const Quarter&) = default;
  friend auto operator<=>(const Quarter& a, const Quarter& b) { return a.ordinal() <=> b.ordinal(); }
};

/// T x N matrix of quarterly observations with per-column metadata.
struct Panel {
  Matrix values;
  std::vector<Quarter> time_index;
  std::vector<SeriesMeta> meta;

  Index rows() const { return values.rows(); }
  Index cols() const { return values.cols(); }

  std::optional<Index> find(const std::string& mnemonic) const {
    for (std::size_t j = 0; j < meta.size(); ++j)
      if (meta[j].mnemonic == mnemonic) return static_cast<Index>(j);
    return std::nullopt;
  }

  Index column_of(const std::string& mnemonic) const {
    auto j = find(mnemonic);
    if (!j) throw ConfigError("series '" + mnemonic + "' not found in panel");
    return *j;
  }

  std::optional<Index> row_of(const Quarter& q) const {
    for (std::size_t t = 0; t < time_index.size(); ++t)
      if (time_index[t] == q) return static_cast<Index>(t);
    return std::nullopt;
  }

  /// Rows [first, first + count).
  Panel slice_rows(Index first, Index count) const {
    if (first < 0 || count < 0 || first + count > rows()) throw ContractError("Panel::slice_rows out of range");
    Panel p;
    p.values = values.middleRows(first, count);
    p.time_index.assign(time_index.begin() + first, time_index.begin() + first + count);
    p.meta = meta;
    return p;
  }

  Panel head(Index count) const { return slice_rows(0, count); }

  /// Checks shape and metadata invariants; throws ConfigError on violation.
  void validate() const {
    if (static_cast<std::size_t>(values.rows()) != time_index.size())
      throw ConfigError("panel has " + std::to_string(values.rows()) + " rows but " +
                        std::to_string(time_index.size()) + " dates");
    if (static_cast<std::size_t>(values.cols()) != meta.size())
      throw ConfigError("panel has " + std::to_string(values.cols()) + " columns but " +
                        std::to_string(meta.size()) + " metadata entries");
    for (std::size_t t = 1; t < time_index.size(); ++t)
      if (time_index[t].ordinal() != time_index[t - 1].ordinal() + 1)
        throw ConfigError("dates are not consecutive quarters at " + time_index[t].to_string());
    std::unordered_set<std::string> seen;
    for (const auto& m : meta) {
      if (m.mnemonic.empty()) throw ConfigError("empty mnemonic in metadata");
      if (!seen.insert(m.mnemonic).second) throw ConfigError("duplicate mnemonic '" + m.mnemonic + "'");
    }
  }
};

/// Trims leading and trailing rows that contain missing values (NaN). No
/// interpolation: a gap strictly inside the common span is an error.
inline Panel balance_panel(const Panel& panel) {
  const Index t_total = panel.rows();
  auto row_complete = [&](Index t) {
    for (Index j = 0; j < panel.cols(); ++j)
      if (!std::isfinite(panel.values(t, j))) return false;
    return true;
  };
  Index first = 0;
  Index last = t_total - 1;
  // The common span is bounded by the latest first observation and the
  // earliest last observation over all columns.
  for (Index j = 0; j < panel.cols(); ++j) {
    Index f = 0;
    while (f < t_total && !std::isfinite(panel.values(f, j))) ++f;
    Index l = t_total - 1;
    while (l >= 0 && !std::isfinite(panel.values(l, j))) --l;
    if (f > l) throw ConfigError("series '" + panel.meta[static_cast<std::size_t>(j)].mnemonic + "' has no observations");
    first = std::max(first, f);
    last = std::min(last, l);
  }
  if (first > last) throw ConfigError("series have no common span");
  for (Index t = first; t <= last; ++t)
    if (!row_complete(t))
      throw ConfigError("missing value inside the common span at " +
                        panel.time_index[static_cast<std::size_t>(t)].to_string());
  return panel.slice_rows(first, last - first + 1);
}

}  // namespace fecm
