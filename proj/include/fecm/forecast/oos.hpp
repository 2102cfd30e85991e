#pragma once

#include <algorithm>
#include <atomic>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "fecm/data/io.hpp"
#include "fecm/data/level_panel.hpp"
#include "fecm/factors/factor_set.hpp"
#include "fecm/forecast/path.hpp"
#include "fecm/models/suite.hpp"

namespace fecm {

/// Expanding-window plan in panel rows. Forecasts target the quarters
/// eval_start..eval_end, so origins run from eval_start - 1 to eval_end - 1
/// and horizon h is kept at origin t only when t + h <= eval_end. Every
/// estimation sample starts at estimation_start.
struct OosPlan {
  Index estimation_start = 0;
  Index eval_start = 0;
  Index eval_end = 0;
  Index refit_every = 1;

  static constexpr Index kMinEstimationRows = 40;

  void validate(Index panel_rows) const {
    if (estimation_start < 0 || estimation_start >= eval_start)
      throw ConfigError("evaluation must start after the estimation sample starts");
    if (eval_start > eval_end) throw ConfigError("evaluation window is empty");
    if (eval_end >= panel_rows) throw ConfigError("evaluation window ends after the data");
    if (eval_start - estimation_start < kMinEstimationRows)
      throw ConfigError("at least " + std::to_string(kMinEstimationRows) + " observations are required before the evaluation window");
    if (refit_every < 1) throw ConfigError("refit_every must be at least 1");
  }

  Index first_origin() const { return eval_start - 1; }
  Index last_origin() const { return eval_end - 1; }
  Index origin_count() const { return eval_end - eval_start + 1; }
};

/// Plan from calendar quarters; `eval_start` and `eval_end` are target dates.
inline OosPlan plan_from_dates(const Panel& panel, const Quarter& estimation_start, const Quarter& eval_start,
                               const Quarter& eval_end, Index refit_every = 1) {
  auto row = [&](const Quarter& q) {
    auto r = panel.row_of(q);
    if (!r) throw ConfigError("date " + q.to_string() + " is outside the data");
    return *r;
  };
  OosPlan p{row(estimation_start), row(eval_start), row(eval_end), refit_every};
  p.validate(panel.rows());
  return p;
}

struct OosOptions {
  std::vector<std::string> targets;
  std::vector<Index> horizons{kDefaultHorizons.begin(), kDefaultHorizons.end()};
  FactorOptions factors;
  bool screen_outliers = true;
  unsigned jobs = 0;  // 0: hardware concurrency
};

struct ForecastRow {
  std::string model;
  std::string target;
  Quarter origin;
  Index horizon = 0;
  double transformed = 0.0;  // one-quarter change at origin + horizon, modelling units
  double level = 0.0;        // original units
  double realized = 0.0;     // original units
  double error() const { return level - realized; }
};

struct SelectionRow {
  std::string model;
  Quarter origin;
  std::string target;
  Index lags = 0;
  std::optional<Index> rank;
  Index r1 = 0;
  Index r0 = 0;
};

struct FailureRow {
  std::string model;
  Quarter origin;
  std::string message;
};

struct OosResult {
  std::vector<std::string> targets;
  std::vector<ForecastPath> paths;  // ordered by (model, origin)
  std::vector<ForecastRow> forecasts;  // ordered by (model, origin, horizon, target)
  std::vector<SelectionRow> selections;
  std::vector<FailureRow> failures;
  std::vector<Index> estimation_rows;  // per origin
};

/// Targets from the prepared sample plus the factor blocks the models use:
/// the trend-restored level factors, the cumulated factors and the
/// stationary factors.
inline ModelInputs make_model_inputs(const PreparedSample& s, const std::vector<Index>& target_cols,
                                const std::vector<std::string>& targets, const FactorSet* fs) {
  ModelInputs in;
  in.targets = targets;
  in.y_levels.resize(s.levels.rows(), static_cast<Index>(target_cols.size()));
  for (std::size_t j = 0; j < target_cols.size(); ++j) in.y_levels.col(static_cast<Index>(j)) = s.levels.values.col(target_cols[j]);
  if (fs) {
    in.f_i1 = fs->f_i1_levels;
    in.f_i1c = fs->f_i1_cumulated;
    in.f_i0 = fs->f_i0;
  } else {
    in.f_i0 = Matrix(s.levels.rows() - 1, 0);
  }
  return in;
}

inline bool needs_factors(ModelKind k) { return uses_stationary_factors(k) || k == ModelKind::FECM || k == ModelKind::FECMc; }

namespace detail {

struct OriginOutput {
  std::vector<std::optional<ForecastPath>> paths;  // per spec
  std::vector<SelectionRow> selections;
  std::vector<FailureRow> failures;
};

}  // namespace detail

/// Recursive pseudo out-of-sample experiment. Factors, lags, ranks and
/// coefficients are re-estimated every `plan.refit_every` origins on data
/// dated no later than the origin; in between, frozen loadings and
/// coefficients are applied to the extended sample. Outlier screening is
/// redone at every origin. A failure at one origin is recorded and skipped.
/// Output order does not depend on `opt.jobs`.
inline OosResult run_recursive_oos(const Panel& panel, const std::vector<ModelSpec>& specs, const OosPlan& plan,
                                   const OosOptions& opt) {
  panel.validate();
  plan.validate(panel.rows());
  check_horizons(opt.horizons);
  if (opt.targets.empty()) throw ConfigError("no target variables");
  std::set<ModelKind> kinds;
  for (const auto& s : specs) {
    s.validate();
    if (!kinds.insert(s.kind).second) throw ConfigError("model " + std::string(to_string(s.kind)) + " listed twice");
  }
  std::vector<Index> target_cols;
  std::vector<TransformRecord> records;
  for (const auto& name : opt.targets) {
    target_cols.push_back(panel.column_of(name));
    records.push_back(target_record(panel.meta[static_cast<std::size_t>(target_cols.back())]));
  }
  const bool any_factors = std::any_of(specs.begin(), specs.end(), [](const ModelSpec& s) { return needs_factors(s.kind); });

  const Index n_origins = plan.origin_count();
  const Index n_blocks = (n_origins + plan.refit_every - 1) / plan.refit_every;
  std::vector<detail::OriginOutput> outputs(static_cast<std::size_t>(n_origins));

  auto run_block = [&](Index b) {
    std::optional<FactorSet> frozen_factors;
    std::string factor_error;
    std::vector<std::optional<FittedModel>> frozen(specs.size());
    std::vector<std::string> fit_error(specs.size());
    const Index first = b * plan.refit_every;
    const Index last = std::min(n_origins, first + plan.refit_every);
    for (Index k = first; k < last; ++k) {
      const Index t = plan.first_origin() + k;
      const bool refit = k == first;
      const Quarter date = panel.time_index[static_cast<std::size_t>(t)];
      detail::OriginOutput& out = outputs[static_cast<std::size_t>(k)];
      out.paths.resize(specs.size());

      std::vector<Index> horizons;
      for (Index h : opt.horizons)
        if (t + h <= plan.eval_end) horizons.push_back(h);

      std::optional<PreparedSample> sample;
      std::string sample_error;
      try {
        sample = prepare_sample(panel.slice_rows(plan.estimation_start, t - plan.estimation_start + 1), opt.screen_outliers);
      } catch (const std::exception& e) {
        sample_error = e.what();
      }

      std::optional<FactorSet> fs;
      if (sample && any_factors) {
        try {
          if (refit) {
            frozen_factors.reset();
            frozen_factors = estimate_factor_set(*sample, opt.factors);
            factor_error.clear();
            fs = frozen_factors;
          } else if (frozen_factors) {
            fs = project_factor_set(*frozen_factors, *sample);
          }
        } catch (const std::exception& e) {
          factor_error = e.what();
          fs.reset();
        }
      }

      std::vector<std::vector<double>> anchors;
      for (std::size_t j = 0; j < target_cols.size(); ++j) {
        std::vector<double> a;
        if (consumed_observations(records[j].tc) == 1) a.push_back(panel.values(t, target_cols[j]));
        anchors.push_back(std::move(a));
      }

      for (std::size_t i = 0; i < specs.size(); ++i) {
        const ModelSpec& spec = specs[i];
        const std::string model(to_string(spec.kind));
        auto fail = [&](const std::string& msg) { out.failures.push_back({model, date, msg}); };
        if (!sample) {
          fail("sample: " + sample_error);
          continue;
        }
        if (needs_factors(spec.kind) && !fs) {
          fail("factors: " + (factor_error.empty() ? std::string("not estimated") : factor_error));
          continue;
        }
        try {
          const ModelInputs in = make_model_inputs(*sample, target_cols, opt.targets, needs_factors(spec.kind) ? &*fs : nullptr);
          if (refit) {
            frozen[i].reset();
            fit_error[i].clear();
            try {
              frozen[i] = fit_model(spec, in);
            } catch (const std::exception& e) {
              fit_error[i] = e.what();
            }
          }
          if (!frozen[i]) {
            fail("fit: " + fit_error[i]);
            continue;
          }
          const FittedModel& fm = *frozen[i];
          const std::vector<Index> lags = fm.lag_counts();
          for (std::size_t j = 0; j < opt.targets.size(); ++j)
            out.selections.push_back({model, date, opt.targets[j], lags.size() == 1 ? lags[0] : lags[j], fm.rank(),
                                      fs ? fs->r1 : 0, fs ? fs->r0 : 0});
          if (horizons.empty()) continue;
          ForecastPath path = iterate_forecast(fm, in, horizons, t);
          aggregate_to_levels(path, records, anchors);
          if (!path.steps.allFinite() || !path.levels.allFinite()) {
            fail("forecast: non-finite values");
            continue;
          }
          out.paths[i] = std::move(path);
        } catch (const std::exception& e) {
          fail(std::string("forecast: ") + e.what());
        }
      }
    }
  };

  unsigned jobs = opt.jobs ? opt.jobs : std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<Index>(jobs, n_blocks));
  if (jobs <= 1) {
    for (Index b = 0; b < n_blocks; ++b) run_block(b);
  } else {
    std::atomic<Index> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < jobs; ++w)
      pool.emplace_back([&] {
        for (Index b = next++; b < n_blocks; b = next++) run_block(b);
      });
    for (auto& th : pool) th.join();
  }

  OosResult res;
  res.targets = opt.targets;
  for (Index k = 0; k < n_origins; ++k) res.estimation_rows.push_back(plan.first_origin() + k - plan.estimation_start + 1);
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const std::string model(to_string(specs[i].kind));
    for (Index k = 0; k < n_origins; ++k) {
      const auto& out = outputs[static_cast<std::size_t>(k)];
      for (const auto& s : out.selections)
        if (s.model == model) res.selections.push_back(s);
      for (const auto& f : out.failures)
        if (f.model == model) res.failures.push_back(f);
      if (!out.paths[i]) continue;
      const ForecastPath& p = *out.paths[i];
      const Quarter date = panel.time_index[static_cast<std::size_t>(p.origin)];
      for (Index h : p.horizons)
        for (std::size_t j = 0; j < target_cols.size(); ++j)
          res.forecasts.push_back({model, opt.targets[j], date, h, p.steps(h - 1, static_cast<Index>(j)),
                                   p.levels(h - 1, static_cast<Index>(j)), panel.values(p.origin + h, target_cols[j])});
      res.paths.push_back(p);
    }
  }
  return res;
}

// Delimited files written by the forecast step and read back by evaluate.

inline void write_forecasts(std::ostream& out, const std::vector<ForecastRow>& rows) {
  out << "model,target,origin,horizon,forecast_transformed,forecast_level,realized_level\n";
  for (const auto& r : rows)
    out << r.model << ',' << r.target << ',' << r.origin.to_string() << ',' << r.horizon << ','
        << io::format_double(r.transformed) << ',' << io::format_double(r.level) << ',' << io::format_double(r.realized)
        << '\n';
}

inline void write_selections(std::ostream& out, const std::vector<SelectionRow>& rows) {
  out << "model,origin,target,lags,rank,r1,r0\n";
  for (const auto& r : rows)
    out << r.model << ',' << r.origin.to_string() << ',' << r.target << ',' << r.lags << ','
        << (r.rank ? std::to_string(*r.rank) : std::string("NA")) << ',' << r.r1 << ',' << r.r0 << '\n';
}

inline void write_failures(std::ostream& out, const std::vector<FailureRow>& rows) {
  out << "model,origin,message\n";
  for (const auto& r : rows) out << r.model << ',' << r.origin.to_string() << ',' << io::quote_if_needed(r.message, ',') << '\n';
}

namespace detail {

inline std::vector<std::vector<std::string>> read_table(std::istream& in, const std::string& expected_header) {
  std::string line;
  if (!std::getline(in, line) || io::trim(line) != expected_header)
    throw ConfigError("expected header '" + expected_header + "'");
  std::vector<std::vector<std::string>> rows;
  const std::size_t width = io::split_line(expected_header, ',').size();
  while (std::getline(in, line)) {
    if (io::trim(line).empty()) continue;
    auto f = io::split_line(line, ',');
    if (f.size() != width) throw ConfigError("malformed row '" + line + "'");
    for (auto& s : f) s = io::trim(s);
    rows.push_back(std::move(f));
  }
  return rows;
}

inline Index parse_index(const std::string& s, const std::string& where) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(s, &pos);
    if (pos != s.size()) throw ConfigError("");
    return static_cast<Index>(v);
  } catch (const std::exception&) {
    throw ConfigError("bad integer '" + s + "' in " + where);
  }
}

}  // namespace detail

inline std::vector<ForecastRow> read_forecasts(std::istream& in) {
  std::vector<ForecastRow> out;
  for (const auto& f : detail::read_table(in, "model,target,origin,horizon,forecast_transformed,forecast_level,realized_level"))
    out.push_back({f[0], f[1], Quarter::parse(f[2]), detail::parse_index(f[3], "forecasts"),
                   io::parse_value(f[4], "forecasts"), io::parse_value(f[5], "forecasts"), io::parse_value(f[6], "forecasts")});
  return out;
}

inline std::vector<SelectionRow> read_selections(std::istream& in) {
  std::vector<SelectionRow> out;
  for (const auto& f : detail::read_table(in, "model,origin,target,lags,rank,r1,r0")) {
    SelectionRow r{f[0], Quarter::parse(f[1]), f[2], detail::parse_index(f[3], "selection"), std::nullopt,
                   detail::parse_index(f[5], "selection"), detail::parse_index(f[6], "selection")};
    if (f[4] != "NA") r.rank = detail::parse_index(f[4], "selection");
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace fecm
