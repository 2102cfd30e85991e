#pragma once

#include <filesystem>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

#include <Eigen/Core>
#include <boost/version.hpp>
#include <nlohmann/json.hpp>

#include "fecm/app/config.hpp"
#include "fecm/data/io.hpp"
#include "fecm/data/level_panel.hpp"
#include "fecm/data/transform.hpp"
#include "fecm/factors/factor_set.hpp"
#include "fecm/forecast/oos.hpp"
#include "fecm/models/serialize.hpp"
#include "fecm/report/eval_report.hpp"
#include "fecm/sim/dgp.hpp"

namespace fecm::app {

inline constexpr const char* kVersion = "0.1.0";

/// Writes files into one output directory and remembers their hashes for
/// the manifest. Content is written in binary mode so hashes match bytes.
class OutputDir {
 public:
  explicit OutputDir(std::string path) : path_(std::move(path)) { std::filesystem::create_directories(path_); }

  const std::string& path() const { return path_; }
  std::string file(const std::string& name) const { return (std::filesystem::path(path_) / name).string(); }

  void write(const std::string& name, const std::string& content) {
    auto out = io::open_output(file(name));
    out << content;
    if (!out) throw ConfigError("failed writing '" + file(name) + "'");
    hashes_[name] = hex64(fnv1a(content));
  }

  template <class F>
  void write_with(const std::string& name, F&& fill) {
    std::ostringstream s;
    fill(s);
    write(name, s.str());
  }

  /// Manifest listing the command, the resolved configuration and its hash,
  /// the seed, library versions and the hash of every file written.
  void write_manifest(const std::string& name, const std::string& command, const std::string& config_text,
                      std::uint64_t seed) {
    nlohmann::json lines = nlohmann::json::array();
    std::istringstream in(config_text);
    for (std::string l; std::getline(in, l);) lines.push_back(l);
    nlohmann::json m = {
        {"schema", "fecm.manifest/1"},
        {"command", command},
        {"config", lines},
        {"config_hash", hex64(fnv1a(config_text))},
        {"seed", seed},
        {"versions",
         {{"fecm", kVersion},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)},
          {"boost", BOOST_LIB_VERSION},
          {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." + std::to_string(NLOHMANN_JSON_VERSION_MINOR) +
                                "." + std::to_string(NLOHMANN_JSON_VERSION_PATCH)}}},
        {"files", hashes_}};
    auto out = io::open_output(file(name));
    out << m.dump(2) << '\n';
  }

 private:
  std::string path_;
  std::map<std::string, std::string> hashes_;
};

/// Input panel: read from data + meta, or simulated from dgp_config with the
/// run seed.
inline Panel load_input_panel(const RunConfig& c) {
  if (!c.dgp_config.empty()) {
    sim::DgpConfig d = sim::load_dgp_config(c.dgp_config);
    d.seed = c.seed;
    return sim::generate_panel(d).panel;
  }
  if (c.data.empty() || c.meta.empty()) throw ConfigError("either data and meta, or dgp_config, must be given");
  return io::load_panel(c.data, c.meta);
}

inline OosPlan resolve_plan(const RunConfig& c, const Panel& p) {
  if (p.rows() == 0) throw ConfigError("empty panel");
  const Quarter first = p.time_index.front();
  const Quarter last = p.time_index.back();
  const Quarter end = c.eval_end.value_or(last);
  const Quarter start = c.eval_start.value_or(end.plus(-27));
  return plan_from_dates(p, c.estimation_start.value_or(first), start, end, c.refit_every);
}

/// Panel rows used for full-sample estimation (estimation_start onwards).
inline Panel estimation_panel(const RunConfig& c, const Panel& p) {
  if (!c.estimation_start) return p;
  auto r = p.row_of(*c.estimation_start);
  if (!r) throw ConfigError("estimation_start " + c.estimation_start->to_string() + " is outside the data");
  return p.slice_rows(*r, p.rows() - *r);
}

inline void check_targets(const RunConfig& c, const Panel& p) {
  for (const auto& t : c.targets) p.column_of(t);
}

// ---- simulate ----

inline void simulate_into(OutputDir& dir, const sim::DgpConfig& cfg) {
  const sim::Simulated s = sim::generate_panel(cfg);
  dir.write_with("panel.csv", [&](std::ostream& o) { io::write_panel(o, s.panel); });
  dir.write_with("meta.csv", [&](std::ostream& o) { io::write_metadata(o, s.panel.meta); });
  dir.write_with("dgp_config.txt", [&](std::ostream& o) { sim::write_dgp_config(o, cfg); });
  std::vector<std::string> fnames;
  Matrix f(s.panel.rows(), s.truth.f_i1.cols() + s.truth.f_i0.cols());
  for (Index k = 0; k < s.truth.f_i1.cols(); ++k) fnames.push_back("F1_" + std::to_string(k + 1));
  for (Index k = 0; k < s.truth.f_i0.cols(); ++k) fnames.push_back("F0_" + std::to_string(k + 1));
  f << s.truth.f_i1, s.truth.f_i0;
  dir.write_with("truth_factors.csv", [&](std::ostream& o) { io::write_dated_matrix(o, s.panel.time_index, fnames, f); });
  dir.write_with("truth_loadings.csv", [&](std::ostream& o) {
    o << "mnemonic,noise_sd";
    for (const auto& n : fnames) o << ',' << n;
    o << '\n';
    for (Index i = 0; i < s.panel.cols(); ++i) {
      o << s.panel.meta[static_cast<std::size_t>(i)].mnemonic << ',' << io::format_double(s.truth.noise_sd(i));
      for (Index k = 0; k < s.truth.loadings_i1.cols(); ++k) o << ',' << io::format_double(s.truth.loadings_i1(i, k));
      for (Index k = 0; k < s.truth.loadings_i0.cols(); ++k) o << ',' << io::format_double(s.truth.loadings_i0(i, k));
      o << '\n';
    }
  });
  dir.write_with("truth_beta.json", [&](std::ostream& o) {
    o << nlohmann::json{{"coint_rank", s.truth.coint_rank}, {"beta", matrix_to_json(s.truth.beta)}}.dump(2) << '\n';
  });
}

inline int cmd_simulate(sim::DgpConfig cfg, const std::string& out_dir, std::ostream& log) {
  cfg.validate();
  OutputDir dir(out_dir);
  simulate_into(dir, cfg);
  std::ostringstream text;
  sim::write_dgp_config(text, cfg);
  dir.write_manifest("manifest-simulate.json", "simulate", text.str(), cfg.seed);
  log << "simulated " << cfg.N << " series x " << cfg.T << " quarters into " << out_dir << '\n';
  return 0;
}

// ---- transform ----

inline void transform_into(OutputDir& dir, const RunConfig& c, const Panel& raw, std::ostream& log) {
  raw.validate();
  Matrix out = Matrix::Constant(raw.rows(), raw.cols(), std::numeric_limits<double>::quiet_NaN());
  std::ostringstream record_log, outlier_log;
  record_log << "mnemonic,tc,log_applied,consumed,first_values\n";
  outlier_log << "series,index,original,replacement\n";
  for (Index j = 0; j < raw.cols(); ++j) {
    const SeriesMeta& m = raw.meta[static_cast<std::size_t>(j)];
    const std::vector<double> col = column_vector(raw.values, j);
    Transformed t = apply_transformation(col, m.tc, m.mnemonic);
    if (c.screen_outliers && t.values.size() >= 6) {
      const OutlierResult o = replace_outliers(t.values);
      for (std::size_t i : o.outlier_indices)
        outlier_log << io::quote_if_needed(m.mnemonic, ',') << ',' << i << ',' << io::format_double(t.values[i]) << ','
                    << io::format_double(o.cleaned[i]) << '\n';
      t.values = o.cleaned;
    }
    const Index offset = raw.rows() - static_cast<Index>(t.values.size());
    for (std::size_t i = 0; i < t.values.size(); ++i) out(offset + static_cast<Index>(i), j) = t.values[i];
    record_log << io::quote_if_needed(m.mnemonic, ',') << ',' << to_int(m.tc) << ',' << (t.record.log_applied ? "true" : "false")
               << ',' << consumed_observations(m.tc) << ',';
    for (std::size_t i = 0; i < t.record.original_first_values.size(); ++i)
      record_log << (i ? ";" : "") << io::format_double(t.record.original_first_values[i]);
    record_log << '\n';
  }
  std::vector<std::string> names;
  for (const auto& m : raw.meta) names.push_back(m.mnemonic);
  dir.write_with("transformed.csv", [&](std::ostream& o) { io::write_dated_matrix(o, raw.time_index, names, out); });
  dir.write("transform_log.csv", record_log.str());
  dir.write("outliers.csv", outlier_log.str());
  std::string warn;
  for (const auto& s : seasonality_warnings(raw)) warn += s + '\n';
  dir.write("seasonality_warnings.txt", warn);
  if (!warn.empty()) log << "warning: seasonal pattern detected in: " << warn;
}

inline int cmd_transform(const RunConfig& c, std::ostream& log) {
  const Panel raw = load_input_panel(c);
  OutputDir dir(c.out);
  transform_into(dir, c, raw, log);
  dir.write_manifest("manifest-transform.json", "transform", canonical_text(c), c.seed);
  log << "transformed " << raw.cols() << " series into " << c.out << '\n';
  return 0;
}

// ---- factors ----

inline FactorSet factors_into(OutputDir& dir, const RunConfig& c, const Panel& p) {
  const PreparedSample sample = prepare_sample(p, c.screen_outliers);
  const FactorSet fs = estimate_factor_set(sample, c.factor_options());
  dir.write_with("factors.csv", [&](std::ostream& o) { write_factor_set(o, p.time_index, fs); });
  auto trace = [](const CriterionTrace& t) {
    return nlohmann::json{{"variance", t.variance}, {"criterion", t.criterion}, {"selected", t.selected}};
  };
  nlohmann::json sel = {{"r1", fs.r1},
                        {"r0", fs.r0},
                        {"i1_criterion", trace(fs.trace_i1)},
                        {"i0_criterion", trace(fs.trace_i0)},
                        {"residual_degenerate", fs.residual_degenerate}};
  dir.write("factor_selection.json", sel.dump(2) + "\n");
  dir.write_with("idiosyncratic_adf.csv", [&](std::ostream& o) {
    o << "series,statistic,critical_value_5pct,rejects_unit_root\n";
    const auto adf = idiosyncratic_adf(sample, fs);
    for (std::size_t j = 0; j < adf.size(); ++j)
      o << io::quote_if_needed(p.meta[j].mnemonic, ',') << ',' << io::format_double(adf[j].statistic) << ','
        << io::format_double(adf[j].critical_value_5pct) << ',' << (adf[j].rejects_unit_root_5pct() ? "true" : "false") << '\n';
  });
  dir.write_with("sample_outliers.csv", [&](std::ostream& o) {
    o << "series,index,original,replacement\n";
    for (const auto& e : sample.outliers)
      o << io::quote_if_needed(e.mnemonic, ',') << ',' << e.index << ',' << io::format_double(e.original) << ','
        << io::format_double(e.replacement) << '\n';
  });
  return fs;
}

inline int cmd_factors(const RunConfig& c, std::ostream& log) {
  const Panel p = estimation_panel(c, load_input_panel(c));
  OutputDir dir(c.out);
  const FactorSet fs = factors_into(dir, c, p);
  dir.write_manifest("manifest-factors.json", "factors", canonical_text(c), c.seed);
  log << "extracted r1=" << fs.r1 << " I(1) and r0=" << fs.r0 << " stationary factors\n";
  return 0;
}

// ---- fit ----

inline void fit_into(OutputDir& dir, const RunConfig& c, const Panel& p, std::ostream& log) {
  check_targets(c, p);
  const PreparedSample sample = prepare_sample(p, c.screen_outliers);
  const auto specs = c.model_specs();
  const bool any = std::any_of(specs.begin(), specs.end(), [](const ModelSpec& s) { return needs_factors(s.kind); });
  std::optional<FactorSet> fs;
  if (any) fs = estimate_factor_set(sample, c.factor_options());
  std::vector<Index> cols;
  for (const auto& t : c.targets) cols.push_back(p.column_of(t));
  nlohmann::json models = nlohmann::json::array();
  for (const auto& spec : specs) {
    try {
      const ModelInputs in = make_model_inputs(sample, cols, c.targets, needs_factors(spec.kind) ? &*fs : nullptr);
      models.push_back(to_json(fit_model(spec, in)));
    } catch (const std::exception& e) {
      models.push_back({{"kind", std::string(to_string(spec.kind))}, {"error", e.what()}});
      log << "fit " << to_string(spec.kind) << " failed: " << e.what() << '\n';
    }
  }
  dir.write("models.json", models.dump(2) + "\n");
}

inline int cmd_fit(const RunConfig& c, std::ostream& log) {
  c.validate();
  const Panel p = estimation_panel(c, load_input_panel(c));
  OutputDir dir(c.out);
  fit_into(dir, c, p, log);
  dir.write_manifest("manifest-fit.json", "fit", canonical_text(c), c.seed);
  log << "fitted " << c.models.size() << " models on " << p.rows() << " quarters\n";
  return 0;
}

// ---- forecast ----

inline OosResult forecast_into(OutputDir& dir, const RunConfig& c, const Panel& p, std::ostream& log) {
  check_targets(c, p);
  OosOptions opt;
  opt.targets = c.targets;
  opt.horizons = c.horizons;
  opt.factors = c.factor_options();
  opt.screen_outliers = c.screen_outliers;
  opt.jobs = c.jobs;
  const OosResult res = run_recursive_oos(p, c.model_specs(), resolve_plan(c, p), opt);
  dir.write_with("forecasts.csv", [&](std::ostream& o) { write_forecasts(o, res.forecasts); });
  dir.write_with("selection.csv", [&](std::ostream& o) { write_selections(o, res.selections); });
  dir.write_with("failures.csv", [&](std::ostream& o) { write_failures(o, res.failures); });
  for (const auto& f : res.failures) log << "origin " << f.origin.to_string() << " " << f.model << " skipped: " << f.message << '\n';
  return res;
}

inline int cmd_forecast(const RunConfig& c, std::ostream& log) {
  c.validate();
  const Panel p = load_input_panel(c);
  OutputDir dir(c.out);
  const OosResult res = forecast_into(dir, c, p, log);
  dir.write_manifest("manifest-forecast.json", "forecast", canonical_text(c), c.seed);
  log << "wrote " << res.forecasts.size() << " forecasts (" << res.failures.size() << " failures)\n";
  return 0;
}

// ---- evaluate ----

inline void evaluate_into(OutputDir& dir, const RunConfig& c, const std::vector<ForecastRow>& forecasts,
                          const std::vector<SelectionRow>& selections) {
  const EvalReport rep = build_report(forecasts, selections);
  for (Index h : rep.horizons) dir.write("table_h" + std::to_string(h) + ".txt", render_tables(rep, h, c.locale));
  const FigureData fig = emit_figure_data(rep);
  dir.write("figure.csv", fig.csv);
  dir.write("figure.svg", fig.svg);
  dir.write("report.json", report_to_json(rep).dump(2) + "\n");
}

inline int cmd_evaluate(const RunConfig& c, std::ostream& log) {
  OutputDir dir(c.out);
  auto fin = io::open_input(dir.file("forecasts.csv"));
  auto sin = io::open_input(dir.file("selection.csv"));
  evaluate_into(dir, c, read_forecasts(fin), read_selections(sin));
  dir.write_manifest("manifest-evaluate.json", "evaluate", canonical_text(c), c.seed);
  log << "report written to " << c.out << '\n';
  return 0;
}

// ---- run ----

/// Full experiment: transform log, factors and fits on the full estimation
/// sample, the recursive forecast exercise, and the report.
inline int cmd_run(const RunConfig& c, std::ostream& log) {
  c.validate();
  const Panel p = load_input_panel(c);
  check_targets(c, p);
  const OosPlan plan = resolve_plan(c, p);
  OutputDir dir(c.out);
  if (!c.dgp_config.empty()) {
    sim::DgpConfig d = sim::load_dgp_config(c.dgp_config);
    d.seed = c.seed;
    simulate_into(dir, d);
  }
  transform_into(dir, c, p, log);
  const Panel est = estimation_panel(c, p);
  factors_into(dir, c, est);
  fit_into(dir, c, est, log);
  const OosResult res = forecast_into(dir, c, p, log);
  evaluate_into(dir, c, res.forecasts, res.selections);
  dir.write_manifest("manifest.json", "run", canonical_text(c), c.seed);
  log << "run complete: " << plan.origin_count() << " origins, " << res.forecasts.size() << " forecasts, "
      << res.failures.size() << " failures; output in " << c.out << '\n';
  return 0;
}

}  // namespace fecm::app
