#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fecm/data/io.hpp"
#include "fecm/forecast/oos.hpp"
#include "fecm/models/spec.hpp"
#include "fecm/report/metrics.hpp"

namespace fecm {

struct SummaryStats {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
};

/// Statistics for one (target, horizon).
struct ReportCell {
  Index n_errors = 0;
  double rmse_ar = 0.0;
  std::map<std::string, double> mse_ratio;   // includes AR = 1
  std::map<std::string, double> rmse_ratio;
};

/// Benchmark-relative accuracy. Models are listed AR first, then the order
/// of kAllModelKinds; summaries are per horizon because each horizon uses a
/// different set of origins.
struct EvalReport {
  std::vector<std::string> targets;
  std::vector<Index> horizons;
  std::vector<std::string> models;
  std::map<std::pair<std::string, Index>, ReportCell> cells;
  std::map<Index, std::map<std::string, SummaryStats>> rank_summary;  // error-correction models
  std::map<Index, std::map<std::string, SummaryStats>> lag_summary;

  const ReportCell& cell(const std::string& target, Index h) const {
    auto it = cells.find({target, h});
    if (it == cells.end()) throw ContractError("report has no entry for " + target + " at h=" + std::to_string(h));
    return it->second;
  }

  /// Models compared against the benchmark, in column order.
  std::vector<std::string> compared_models() const {
    std::vector<std::string> out;
    for (const auto& m : models)
      if (m != "AR") out.push_back(m);
    return out;
  }
};

namespace detail {

inline int model_order(const std::string& name) {
  for (std::size_t i = 0; i < kAllModelKinds.size(); ++i)
    if (to_string(kAllModelKinds[i]) == name) return static_cast<int>(i);
  return static_cast<int>(kAllModelKinds.size());
}

inline SummaryStats summarize(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  SummaryStats s;
  s.min = *std::min_element(v.begin(), v.end());
  s.max = *std::max_element(v.begin(), v.end());
  double sum = 0.0;
  for (double x : v) sum += x;
  s.mean = sum / static_cast<double>(v.size());
  return s;
}

}  // namespace detail

/// Builds the report from forecast and selection rows. For each (target,
/// horizon) only origins at which every model produced a forecast are used,
/// so error counts match across models. Statistics do not depend on row
/// order.
inline EvalReport build_report(const std::vector<ForecastRow>& forecasts, const std::vector<SelectionRow>& selections) {
  if (forecasts.empty()) throw ContractError("build_report: no forecasts");
  EvalReport rep;
  std::set<std::string> model_set, target_set;
  std::set<Index> horizon_set;
  // (target, h) -> model -> origin ordinal -> error
  std::map<std::pair<std::string, Index>, std::map<std::string, std::map<int, double>>> errors;
  std::vector<std::string> target_order;
  for (const auto& f : forecasts) {
    model_set.insert(f.model);
    if (target_set.insert(f.target).second) target_order.push_back(f.target);
    horizon_set.insert(f.horizon);
    errors[{f.target, f.horizon}][f.model][f.origin.ordinal()] = f.error();
  }
  if (!model_set.count("AR")) throw ConfigError("build_report: the AR benchmark is missing");
  rep.models.assign(model_set.begin(), model_set.end());
  std::stable_sort(rep.models.begin(), rep.models.end(),
                   [](const std::string& a, const std::string& b) { return detail::model_order(a) < detail::model_order(b); });
  rep.targets = target_order;
  rep.horizons.assign(horizon_set.begin(), horizon_set.end());

  std::map<Index, std::set<int>> used_origins;
  for (const auto& target : rep.targets) {
    for (Index h : rep.horizons) {
      auto& by_model = errors[{target, h}];
      std::set<int> common;
      bool first = true;
      for (const auto& m : rep.models) {
        std::set<int> mine;
        for (const auto& [o, e] : by_model[m]) mine.insert(o);
        if (first) common = mine;
        else {
          std::set<int> keep;
          std::set_intersection(common.begin(), common.end(), mine.begin(), mine.end(), std::inserter(keep, keep.end()));
          common = std::move(keep);
        }
        first = false;
      }
      if (common.empty()) throw NumericError("no common forecast origins for " + target + " at h=" + std::to_string(h));
      used_origins[h].insert(common.begin(), common.end());
      auto collect = [&](const std::string& m) {
        std::vector<double> v;
        for (int o : common) v.push_back(by_model[m].at(o));
        return v;
      };
      ReportCell cell;
      const std::vector<double> ar = collect("AR");
      cell.n_errors = static_cast<Index>(ar.size());
      cell.rmse_ar = compute_rmse(ar);
      for (const auto& m : rep.models) {
        const RelativeError r = m == "AR" ? RelativeError{1.0, 1.0} : relative_mse(collect(m), ar);
        cell.mse_ratio[m] = r.mse_ratio;
        cell.rmse_ratio[m] = r.rmse_ratio;
      }
      rep.cells[{target, h}] = std::move(cell);
    }
  }

  for (Index h : rep.horizons) {
    const auto& origins = used_origins[h];
    std::map<std::string, std::vector<double>> ranks, lags;
    std::set<std::pair<std::string, int>> seen_rank;
    for (const auto& s : selections) {
      if (!origins.count(s.origin.ordinal()) || !model_set.count(s.model)) continue;
      if (target_set.count(s.target)) lags[s.model].push_back(static_cast<double>(s.lags));
      if (s.rank && seen_rank.insert({s.model, s.origin.ordinal()}).second) ranks[s.model].push_back(static_cast<double>(*s.rank));
    }
    for (const auto& [m, v] : ranks) rep.rank_summary[h][m] = detail::summarize(v);
    for (const auto& [m, v] : lags) rep.lag_summary[h][m] = detail::summarize(v);
  }
  return rep;
}

enum class DecimalMark { Point, Comma };

namespace detail {

inline std::string number(double v, DecimalMark mark, int digits = 2) {
  std::string s = io::format_fixed(v, digits);
  if (mark == DecimalMark::Comma) std::replace(s.begin(), s.end(), '.', ',');
  return s;
}

inline std::string pad(const std::string& s, std::size_t width) {
  return s + std::string(s.size() < width ? width - s.size() : 1, ' ');
}

inline std::string rtrim(std::string s) {
  while (!s.empty() && s.back() == ' ') s.pop_back();
  return s;
}

inline constexpr std::size_t kNameWidth = 20;
inline constexpr std::size_t kRmseWidth = 12;
inline constexpr std::size_t kCellWidth = 8;

inline std::string summary_block(const std::string& title, const std::map<std::string, SummaryStats>& stats,
                                 const std::vector<std::string>& order, DecimalMark mark) {
  std::ostringstream out;
  out << '\n' << rtrim(pad(title, kNameWidth) + pad("Mean", kRmseWidth) + pad("Min", kCellWidth) + "Max") << '\n';
  for (const auto& m : order) {
    auto it = stats.find(m);
    if (it == stats.end()) continue;
    out << rtrim(pad(m, kNameWidth) + pad(number(it->second.mean, mark), kRmseWidth) + pad(number(it->second.min, mark), kCellWidth) +
                 number(it->second.max, mark))
        << '\n';
  }
  return out.str();
}

}  // namespace detail

/// Fixed-width text table for one horizon: AR RMSE and MSE ratios per target,
/// then the cointegration rank and lag summaries when present. Pure function
/// of the report.
inline std::string render_tables(const EvalReport& rep, Index h, DecimalMark mark = DecimalMark::Point) {
  using detail::kCellWidth;
  using detail::kNameWidth;
  using detail::kRmseWidth;
  using detail::pad;
  using detail::rtrim;
  const std::vector<std::string> models = rep.compared_models();
  std::ostringstream out;
  out << rtrim(pad("h=" + std::to_string(h), kNameWidth) + pad("", kRmseWidth) + (models.empty() ? "" : "MSE model/MSE_AR")) << '\n';
  std::string header = pad("Variables", kNameWidth) + pad("RMSE of AR", kRmseWidth);
  for (const auto& m : models) header += pad(m, kCellWidth);
  out << rtrim(header) << '\n';
  if (models.empty()) return out.str();
  for (const auto& target : rep.targets) {
    const ReportCell& c = rep.cell(target, h);
    std::string line = pad(target, kNameWidth) + pad(detail::number(c.rmse_ar, mark), kRmseWidth);
    for (const auto& m : models) line += pad(detail::number(c.mse_ratio.at(m), mark), kCellWidth);
    out << rtrim(line) << '\n';
  }
  if (auto it = rep.rank_summary.find(h); it != rep.rank_summary.end() && !it->second.empty())
    out << detail::summary_block("Cointegration rank", it->second, rep.models, mark);
  if (auto it = rep.lag_summary.find(h); it != rep.lag_summary.end() && !it->second.empty())
    out << detail::summary_block("Lags", it->second, rep.models, mark);
  return out.str();
}

struct FigureData {
  std::string csv;
  std::string svg;
};

/// Grouped bars, one group per (target, horizon) and one bar per compared
/// model, with bar height the RMSE ratio to AR and a reference line at 1.
/// The companion CSV carries both ratios.
inline FigureData emit_figure_data(const EvalReport& rep) {
  const std::vector<std::string> models = rep.compared_models();
  if (rep.cells.empty()) throw ContractError("emit_figure_data: empty report");
  FigureData fig;
  std::ostringstream csv;
  csv << "target,horizon,model,mse_ratio,rmse_ratio\n";
  double top = 1.0;
  for (const auto& target : rep.targets)
    for (Index h : rep.horizons) {
      const ReportCell& c = rep.cell(target, h);
      for (const auto& m : models) {
        csv << target << ',' << h << ',' << m << ',' << io::format_double(c.mse_ratio.at(m)) << ','
            << io::format_double(c.rmse_ratio.at(m)) << '\n';
        top = std::max(top, c.rmse_ratio.at(m));
      }
    }
  fig.csv = csv.str();

  static const char* kPalette[] = {"#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1"};
  const double bar = 12.0, gap = 18.0, left = 50.0, plot_h = 240.0, top_pad = 30.0;
  const std::size_t groups = rep.targets.size() * rep.horizons.size();
  const double group_w = static_cast<double>(models.size()) * bar + gap;
  const double width = left + static_cast<double>(groups) * group_w + 20.0;
  const double legend_y = top_pad + plot_h + 50.0;
  const double height = legend_y + 20.0;
  const double ymax = std::ceil(top * 4.0) / 4.0;
  auto y_of = [&](double v) { return top_pad + plot_h * (1.0 - v / ymax); };
  auto f = [](double v) { return io::format_fixed(v, 2); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f(width) << "\" height=\"" << f(height) << "\">\n";
  svg << "<text x=\"" << f(left) << "\" y=\"18\" font-size=\"12\">RMSE model / RMSE AR</text>\n";
  svg << "<line x1=\"" << f(left) << "\" y1=\"" << f(top_pad) << "\" x2=\"" << f(left) << "\" y2=\"" << f(top_pad + plot_h)
      << "\" stroke=\"black\"/>\n";
  for (double tick = 0.0; tick <= ymax + 1e-9; tick += 0.25)
    svg << "<text x=\"" << f(left - 6) << "\" y=\"" << f(y_of(tick) + 4) << "\" font-size=\"9\" text-anchor=\"end\">" << f(tick)
        << "</text>\n";
  std::size_t g = 0;
  for (const auto& target : rep.targets)
    for (Index h : rep.horizons) {
      const ReportCell& c = rep.cell(target, h);
      const double x0 = left + gap / 2 + static_cast<double>(g) * group_w;
      for (std::size_t k = 0; k < models.size(); ++k) {
        const double v = c.rmse_ratio.at(models[k]);
        svg << "<rect x=\"" << f(x0 + static_cast<double>(k) * bar) << "\" y=\"" << f(y_of(v)) << "\" width=\"" << f(bar - 1)
            << "\" height=\"" << f(top_pad + plot_h - y_of(v)) << "\" fill=\"" << kPalette[k % 7] << "\"><title>" << target
            << " h=" << h << ' ' << models[k] << ' ' << io::format_fixed(v, 3) << "</title></rect>\n";
      }
      svg << "<text x=\"" << f(x0 + static_cast<double>(models.size()) * bar / 2) << "\" y=\"" << f(top_pad + plot_h + 14)
          << "\" font-size=\"9\" text-anchor=\"middle\">" << target << " h=" << h << "</text>\n";
      ++g;
    }
  svg << "<line x1=\"" << f(left) << "\" y1=\"" << f(y_of(1.0)) << "\" x2=\"" << f(width - 20) << "\" y2=\"" << f(y_of(1.0))
      << "\" stroke=\"black\" stroke-dasharray=\"4 3\"/>\n";
  for (std::size_t k = 0; k < models.size(); ++k) {
    const double x = left + static_cast<double>(k) * 70.0;
    svg << "<rect x=\"" << f(x) << "\" y=\"" << f(legend_y - 9) << "\" width=\"10\" height=\"10\" fill=\"" << kPalette[k % 7] << "\"/>"
        << "<text x=\"" << f(x + 14) << "\" y=\"" << f(legend_y) << "\" font-size=\"10\">" << models[k] << "</text>\n";
  }
  svg << "</svg>\n";
  fig.svg = svg.str();
  return fig;
}

/// JSON schema "fecm.eval_report/1":
///   {"schema", "targets": [..], "horizons": [..], "models": [..],
///    "cells": [{"target", "horizon", "n_errors", "rmse_ar", "mse_ratio": {model: x}, "rmse_ratio": {model: x}}],
///    "rank_summary": {"<h>": {model: {"mean", "min", "max"}}}, "lag_summary": same shape}
inline nlohmann::json report_to_json(const EvalReport& rep) {
  using nlohmann::json;
  json cells = json::array();
  for (const auto& target : rep.targets)
    for (Index h : rep.horizons) {
      const ReportCell& c = rep.cell(target, h);
      cells.push_back({{"target", target}, {"horizon", h}, {"n_errors", c.n_errors}, {"rmse_ar", c.rmse_ar},
                       {"mse_ratio", c.mse_ratio}, {"rmse_ratio", c.rmse_ratio}});
    }
  auto summaries = [](const std::map<Index, std::map<std::string, SummaryStats>>& s) {
    json out = json::object();
    for (const auto& [h, per_model] : s) {
      json jm = json::object();
      for (const auto& [m, st] : per_model) jm[m] = {{"mean", st.mean}, {"min", st.min}, {"max", st.max}};
      out[std::to_string(h)] = jm;
    }
    return out;
  };
  return json{{"schema", "fecm.eval_report/1"},
              {"targets", rep.targets},
              {"horizons", rep.horizons},
              {"models", rep.models},
              {"cells", cells},
              {"rank_summary", summaries(rep.rank_summary)},
              {"lag_summary", summaries(rep.lag_summary)}};
}

}  // namespace fecm
