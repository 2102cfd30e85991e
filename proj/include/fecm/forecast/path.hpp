#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "fecm/data/level_panel.hpp"
#include "fecm/data/transform.hpp"
#include "fecm/models/suite.hpp"

namespace fecm {

inline constexpr std::array<Index, 4> kDefaultHorizons = {1, 2, 4, 8};

/// Forecasts of every target from one origin. `steps` holds the whole
/// iterated path (row s is step s + 1) so levels can be aggregated; the
/// reported horizons are a sorted subset of 1..steps.rows().
struct ForecastPath {
  ModelKind model_kind = ModelKind::AR;
  Index origin = 0;  // row of the last observation used
  std::vector<Index> horizons;
  Matrix steps;   // H x n, differences in modelling units
  Matrix levels;  // H x n, original units; empty until aggregated

  Vector diff_at(Index h) const { return steps.row(h - 1).transpose(); }
  Vector level_at(Index h) const { return levels.row(h - 1).transpose(); }
};

inline void check_horizons(const std::vector<Index>& horizons) {
  if (horizons.empty()) throw ConfigError("no forecast horizons");
  for (std::size_t i = 0; i < horizons.size(); ++i) {
    if (horizons[i] < 1) throw ConfigError("forecast horizons must be positive");
    if (i > 0 && horizons[i] <= horizons[i - 1]) throw ConfigError("forecast horizons must be strictly ascending");
  }
}

/// Record that maps a target's modelled differences back to its original
/// units. Targets are modelled as first differences of the level panel
/// column, so an I(1) series behaves like code 2 (5 when logged) and an I(0)
/// series, which the level panel cumulates, like code 1 (4 when logged).
inline TransformRecord target_record(const SeriesMeta& m) {
  if (!m.integration_order) throw ConfigError("series '" + m.mnemonic + "' has no integration order");
  const bool logged = uses_log_levels(m);
  TransformRecord r;
  if (*m.integration_order == IntegrationOrder::I1)
    r.tc = logged ? TransformCode::DiffLog : TransformCode::Diff;
  else
    r.tc = logged ? TransformCode::Log : TransformCode::Level;
  r.log_applied = logged;
  return r;
}

/// Iterated forecasts for steps 1..max(horizons).
inline ForecastPath iterate_forecast(const FittedModel& fm, const ModelInputs& in, const std::vector<Index>& horizons,
                                     Index origin = 0) {
  check_horizons(horizons);
  ForecastPath path;
  path.model_kind = fm.kind;
  path.origin = origin;
  path.horizons = horizons;
  path.steps = forecast_model(fm, in, horizons.back());
  return path;
}

/// Fills `path.levels` by inverting each target's record from its last
/// observed original values. Only first-difference records (codes 1, 2, 4,
/// 5) fit a path of one-step differences.
inline void aggregate_to_levels(ForecastPath& path, const std::vector<TransformRecord>& records,
                                const std::vector<std::vector<double>>& last_levels) {
  const Index n = path.steps.cols();
  if (static_cast<Index>(records.size()) != n || static_cast<Index>(last_levels.size()) != n)
    throw ContractError("aggregate_to_levels: one record and one anchor per target required");
  path.levels.resize(path.steps.rows(), n);
  for (Index j = 0; j < n; ++j) {
    const TransformRecord& r = records[static_cast<std::size_t>(j)];
    if (consumed_observations(r.tc) > 1)
      throw ContractError("aggregate_to_levels: code " + std::to_string(to_int(r.tc)) +
                          " does not match a path of first differences");
    const std::vector<double> d = column_vector(path.steps, j);
    const std::vector<double> lv = invert_transformation(last_levels[static_cast<std::size_t>(j)], d, r);
    for (Index s = 0; s < path.steps.rows(); ++s) path.levels(s, j) = lv[static_cast<std::size_t>(s)];
  }
}

}  // namespace fecm
