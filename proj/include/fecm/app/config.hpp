#pragma once

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fecm/data/io.hpp"
#include "fecm/factors/factor_set.hpp"
#include "fecm/forecast/oos.hpp"
#include "fecm/models/spec.hpp"
#include "fecm/report/eval_report.hpp"

namespace fecm::app {

/// Everything a run needs. Precedence: built-in defaults, then the config
/// file, then command-line flags. Either `data` + `meta` or `dgp_config` must
/// be set; with `dgp_config` the panel is simulated using `seed`.
struct RunConfig {
  std::string data;
  std::string meta;
  std::string dgp_config;
  std::string out = "fecm_out";
  std::uint64_t seed = 1;
  std::vector<std::string> targets{"PPI", "CPI", "MMIR"};
  std::vector<Index> horizons{kDefaultHorizons.begin(), kDefaultHorizons.end()};
  std::vector<ModelKind> models{kAllModelKinds.begin(), kAllModelKinds.end()};
  std::optional<Index> r1 = 1;  // unset: information criterion
  std::optional<Index> r0 = 3;
  Index r_max_i1 = 8;
  Index r_max_i0 = 8;
  Index r_extra = 0;
  ResidualMode residual_mode = ResidualMode::Append;
  bool detrend = true;
  LagCriterion criterion = LagCriterion::BIC;
  RankMethod rank_method = RankMethod::ChengPhillipsBIC;
  Index max_lag = 4;
  std::optional<Quarter> estimation_start;  // default: first date
  std::optional<Quarter> eval_start;        // default: eval_end - 27
  std::optional<Quarter> eval_end;          // default: last date
  Index refit_every = 1;
  bool screen_outliers = true;
  DecimalMark locale = DecimalMark::Point;
  unsigned jobs = 0;

  void validate() const {
    if (targets.empty()) throw ConfigError("no targets");
    check_horizons(horizons);
    if (models.empty()) throw ConfigError("no models");
    if (max_lag < 1) throw ConfigError("max_lag must be at least 1");
    if (refit_every < 1) throw ConfigError("refit_every must be at least 1");
    if (r1 && *r1 < 0) throw ConfigError("r1 must be non-negative");
    if (r0 && *r0 < 0) throw ConfigError("r0 must be non-negative");
    for (const auto& s : model_specs()) s.validate();
  }

  std::vector<ModelSpec> model_specs() const {
    std::vector<ModelSpec> out;
    for (ModelKind k : models) {
      ModelSpec s;
      s.kind = k;
      s.variables = targets;
      s.max_lag = max_lag;
      s.lag_criterion = criterion;
      s.rank_method = rank_method;
      s.r1 = r1.value_or(1);
      s.r0 = r0.value_or(1);
      out.push_back(s);
    }
    return out;
  }

  FactorOptions factor_options() const {
    FactorOptions f;
    f.r1 = r1;
    f.r0 = r0;
    f.r_max_i1 = r_max_i1;
    f.r_max_i0 = r_max_i0;
    f.detrend = detrend;
    f.r_extra = r_extra;
    f.residual_mode = residual_mode;
    return f;
  }
};

namespace detail {

inline std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  for (auto& tok : io::split_line(v, ',')) {
    std::string t = io::trim(tok);
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

inline std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + v[i];
  return out;
}

inline Index to_index(const std::string& v, const std::string& key) {
  Index out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) throw ConfigError("'" + key + "' expects an integer, got '" + v + "'");
  return out;
}

inline bool to_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("'" + key + "' expects true or false, got '" + v + "'");
}

inline std::optional<Index> to_count_or_ic(const std::string& v, const std::string& key) {
  if (v == "ic") return std::nullopt;
  return to_index(v, key);
}

// Empty means "use the default".
inline std::optional<Quarter> optional_quarter(const std::string& v) {
  if (v.empty()) return std::nullopt;
  return Quarter::parse(v);
}

}  // namespace detail

/// Applies one `key = value` setting. Flags and file lines share this path.
inline void set_option(RunConfig& c, const std::string& key, const std::string& value) {
  using namespace detail;
  const std::string& v = value;
  if (key == "data") c.data = v;
  else if (key == "meta") c.meta = v;
  else if (key == "dgp_config") c.dgp_config = v;
  else if (key == "out") c.out = v;
  else if (key == "seed") {
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), c.seed);
    if (ec != std::errc() || p != v.data() + v.size()) throw ConfigError("'seed' expects an unsigned integer");
  } else if (key == "targets") c.targets = split_list(v);
  else if (key == "horizons") {
    c.horizons.clear();
    for (const auto& h : split_list(v)) c.horizons.push_back(to_index(h, key));
  } else if (key == "models") {
    c.models.clear();
    for (const auto& m : split_list(v)) c.models.push_back(model_kind_from_string(m));
  } else if (key == "r1") c.r1 = to_count_or_ic(v, key);
  else if (key == "r0") c.r0 = to_count_or_ic(v, key);
  else if (key == "r_max_i1") c.r_max_i1 = to_index(v, key);
  else if (key == "r_max_i0") c.r_max_i0 = to_index(v, key);
  else if (key == "r_extra") c.r_extra = to_index(v, key);
  else if (key == "residual_mode") {
    if (v == "append") c.residual_mode = ResidualMode::Append;
    else if (v == "include") c.residual_mode = ResidualMode::Include;
    else throw ConfigError("'residual_mode' expects append or include");
  } else if (key == "detrend") c.detrend = to_bool(v, key);
  else if (key == "criterion") {
    if (v == "bic" || v == "BIC") c.criterion = LagCriterion::BIC;
    else if (v == "hq" || v == "HQ") c.criterion = LagCriterion::HQ;
    else throw ConfigError("'criterion' expects bic or hq");
  } else if (key == "rank_method") {
    if (v == "johansen") c.rank_method = RankMethod::JohansenTrace;
    else if (v == "cp-bic") c.rank_method = RankMethod::ChengPhillipsBIC;
    else throw ConfigError("'rank_method' expects johansen or cp-bic");
  } else if (key == "max_lag") c.max_lag = to_index(v, key);
  else if (key == "estimation_start") c.estimation_start = optional_quarter(v);
  else if (key == "eval_start") c.eval_start = optional_quarter(v);
  else if (key == "eval_end") c.eval_end = optional_quarter(v);
  else if (key == "refit_every") c.refit_every = to_index(v, key);
  else if (key == "screen_outliers") c.screen_outliers = to_bool(v, key);
  else if (key == "locale") {
    if (v == "point") c.locale = DecimalMark::Point;
    else if (v == "comma") c.locale = DecimalMark::Comma;
    else throw ConfigError("'locale' expects point or comma");
  } else if (key == "jobs") c.jobs = static_cast<unsigned>(to_index(v, key));
  else throw ConfigError("unknown configuration key '" + key + "'");
}

/// `key = value` lines; '#' starts a comment.
inline void read_run_config(std::istream& in, RunConfig& c) {
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = io::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    try {
      set_option(c, io::trim(line.substr(0, eq)), io::trim(line.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

inline void load_run_config(const std::string& path, RunConfig& c) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  read_run_config(in, c);
}

/// Canonical text of the resolved configuration, one key per line in a
/// fixed order. Excludes `out` and `jobs`, which do not affect results.
inline std::string canonical_text(const RunConfig& c) {
  using detail::join;
  std::ostringstream s;
  auto count = [](const std::optional<Index>& r) { return r ? std::to_string(*r) : std::string("ic"); };
  std::vector<std::string> hs, ms;
  for (Index h : c.horizons) hs.push_back(std::to_string(h));
  for (ModelKind k : c.models) ms.emplace_back(to_string(k));
  s << "data = " << c.data << '\n'
    << "meta = " << c.meta << '\n'
    << "dgp_config = " << c.dgp_config << '\n'
    << "seed = " << c.seed << '\n'
    << "targets = " << join(c.targets) << '\n'
    << "horizons = " << join(hs) << '\n'
    << "models = " << join(ms) << '\n'
    << "r1 = " << count(c.r1) << '\n'
    << "r0 = " << count(c.r0) << '\n'
    << "r_max_i1 = " << c.r_max_i1 << '\n'
    << "r_max_i0 = " << c.r_max_i0 << '\n'
    << "r_extra = " << c.r_extra << '\n'
    << "residual_mode = " << (c.residual_mode == ResidualMode::Append ? "append" : "include") << '\n'
    << "detrend = " << (c.detrend ? "true" : "false") << '\n'
    << "criterion = " << (c.criterion == LagCriterion::BIC ? "bic" : "hq") << '\n'
    << "rank_method = " << (c.rank_method == RankMethod::JohansenTrace ? "johansen" : "cp-bic") << '\n'
    << "max_lag = " << c.max_lag << '\n'
    << "estimation_start = " << (c.estimation_start ? c.estimation_start->to_string() : "") << '\n'
    << "eval_start = " << (c.eval_start ? c.eval_start->to_string() : "") << '\n'
    << "eval_end = " << (c.eval_end ? c.eval_end->to_string() : "") << '\n'
    << "refit_every = " << c.refit_every << '\n'
    << "screen_outliers = " << (c.screen_outliers ? "true" : "false") << '\n'
    << "locale = " << (c.locale == DecimalMark::Point ? "point" : "comma") << '\n';
  return s.str();
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace fecm::app
