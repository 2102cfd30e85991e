#pragma once

#include <charconv>
#include <cstdio>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "fecm/data/io.hpp"
#include "fecm/data/panel.hpp"
#include "fecm/error.hpp"
#include "fecm/linalg.hpp"
#include "fecm/random.hpp"

namespace fecm::sim {

/// Factor DGP:
///   F1_t = drift + F1_{t-1} + v_t            (r1_true random walks)
///   F0_t = rho F0_{t-1} + w_t                (r0_true AR(1), rho = factor_ar)
///   x_it = l1_i'F1_t + l0_i'F0_t + s_i e_it  (e_it AR(1) with idio_ar)
///   y_jt = g_j'F1_t + d_j'F0_t + u_jt        (targets, first n_targets columns)
///   u_jt = (1 - coint_strength) u_j,t-1 + s_j eps_jt
/// All innovations are standard normal. s_i sets the ratio of the sample
/// variance of the differenced common component to the population variance
/// of the differenced noise to snr; snr = inf drops the idiosyncratic noise
/// (u is kept, it is the equilibrium error). With no factors the noise has
/// unit scale. Target trend loadings are +-(target_loading_floor + |z|) so
/// every target is driven by the trends.
struct DgpConfig {
  Index N = 100;
  Index T = 200;
  Index r1_true = 1;
  Index r0_true = 3;
  double coint_strength = 0.5;
  double idio_ar = 0.5;
  double snr = 1.0;
  std::uint64_t seed = 1;
  double factor_ar = 0.5;
  double trend_drift = 0.0;
  double target_loading_floor = 0.5;
  Index n_targets = 3;
  std::vector<std::string> target_names{"PPI", "CPI", "MMIR"};
  Quarter start{1985, 1};

  void validate() const {
    if (N < 2) throw ConfigError("DGP: N must be at least 2");
    if (T < 50) throw ConfigError("DGP: T must be at least 50");
    if (r1_true < 0 || r0_true < 0) throw ConfigError("DGP: factor counts must be non-negative");
    if (!(snr > 0)) throw ConfigError("DGP: snr must be positive");
    if (!(std::abs(idio_ar) < 1)) throw ConfigError("DGP: |idio_ar| must be below 1");
    if (!(std::abs(factor_ar) < 1)) throw ConfigError("DGP: |factor_ar| must be below 1");
    if (!(target_loading_floor >= 0)) throw ConfigError("DGP: target_loading_floor must be non-negative");
    if (!(coint_strength > 0 && coint_strength <= 1)) throw ConfigError("DGP: coint_strength must lie in (0, 1]");
    if (n_targets < 0 || n_targets > N) throw ConfigError("DGP: n_targets must lie in [0, N]");
  }

  std::string target_name(Index j) const {
    if (j < static_cast<Index>(target_names.size())) return target_names[static_cast<std::size_t>(j)];
    return "Y" + std::to_string(j + 1);
  }
};

struct GroundTruth {
  Matrix f_i1;        // T x r1_true
  Matrix f_i0;        // T x r0_true
  Matrix loadings_i1; // N x r1_true (target rows hold g_j)
  Matrix loadings_i0; // N x r0_true
  Vector noise_sd;    // s_i
  Matrix equilibrium_error;  // T x n_targets, u
  /// Cointegrating vectors of the stacked [targets, F1] system, one column
  /// per target: y_j - g_j'F1 is stationary.
  Matrix beta;
  Index coint_rank = 0;
};

struct Simulated {
  Panel panel;
  GroundTruth truth;
};

namespace detail {

inline double ar1_diff_variance(double rho) { return 2.0 / (1.0 + rho); }

inline Matrix ar1_paths(Rng& rng, Index t_len, Index k, double rho) {
  Matrix out(t_len, k);
  const double sd0 = 1.0 / std::sqrt(1.0 - rho * rho);
  for (Index j = 0; j < k; ++j) {
    double v = sd0 * rng.normal();
    for (Index t = 0; t < t_len; ++t) {
      if (t > 0) v = rho * v + rng.normal();
      out(t, j) = v;
    }
  }
  return out;
}

}  // namespace detail

inline Simulated generate_panel(const DgpConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  const Index t_len = cfg.T;
  const Index n = cfg.N;
  const Index nt = cfg.n_targets;
  GroundTruth g;

  g.f_i1 = Matrix::Zero(t_len, cfg.r1_true);
  for (Index k = 0; k < cfg.r1_true; ++k) {
    double v = 0.0;
    for (Index t = 0; t < t_len; ++t) {
      v += cfg.trend_drift + rng.normal();
      g.f_i1(t, k) = v;
    }
  }
  g.f_i0 = detail::ar1_paths(rng, t_len, cfg.r0_true, cfg.factor_ar);
  g.loadings_i1 = rng.normal_matrix(n, cfg.r1_true);
  g.loadings_i0 = rng.normal_matrix(n, cfg.r0_true);
  for (Index i = 0; i < std::min(nt, n); ++i)
    for (Index k = 0; k < cfg.r1_true; ++k) {
      const double z = g.loadings_i1(i, k);
      g.loadings_i1(i, k) = (z < 0 ? -1.0 : 1.0) * (cfg.target_loading_floor + std::abs(z));
    }

  const Matrix common = g.f_i1 * g.loadings_i1.transpose() + g.f_i0 * g.loadings_i0.transpose();
  const Matrix dcommon = demean_columns(diff_rows(common));
  const double u_rho = 1.0 - cfg.coint_strength;
  const bool noiseless = std::isinf(cfg.snr);
  g.noise_sd = Vector::Zero(n);
  for (Index i = 0; i < n; ++i) {
    const double v = dcommon.col(i).squaredNorm() / static_cast<double>(t_len - 1);
    const double signal = v > 0 ? v : 1.0;
    const double noise_unit = detail::ar1_diff_variance(i < nt ? u_rho : cfg.idio_ar);
    if (i < nt) g.noise_sd(i) = std::sqrt(signal / ((noiseless ? 1.0 : cfg.snr) * noise_unit));
    else if (!noiseless) g.noise_sd(i) = std::sqrt(signal / (cfg.snr * noise_unit));
  }

  Matrix x = common;
  g.equilibrium_error = Matrix::Zero(t_len, nt);
  for (Index i = 0; i < n; ++i) {
    const double rho = i < nt ? u_rho : cfg.idio_ar;
    // Targets start at u = 0 so the equilibrium error is a fixed-start AR(1).
    double e = i < nt ? 0.0 : rng.normal() / std::sqrt(1.0 - rho * rho);
    for (Index t = 0; t < t_len; ++t) {
      if (t > 0 || i < nt) e = rho * e + rng.normal();
      x(t, i) += g.noise_sd(i) * e;
      if (i < nt) g.equilibrium_error(t, i) = g.noise_sd(i) * e;
    }
  }

  g.coint_rank = cfg.r1_true > 0 ? nt : 0;
  g.beta = Matrix::Zero(nt + cfg.r1_true, nt);
  g.beta.topRows(nt) = Matrix::Identity(nt, nt);
  if (cfg.r1_true > 0) g.beta.bottomRows(cfg.r1_true) = -g.loadings_i1.topRows(nt).transpose();

  Simulated out;
  out.panel.values = std::move(x);
  for (Index t = 0; t < t_len; ++t) out.panel.time_index.push_back(cfg.start.plus(static_cast<int>(t)));
  const bool integrated = cfg.r1_true > 0;
  for (Index i = 0; i < n; ++i) {
    SeriesMeta m;
    m.id = static_cast<int>(i + 1);
    if (i < nt) {
      m.mnemonic = cfg.target_name(i);
      m.description = "synthetic target";
    } else {
      char buf[16];
      std::snprintf(buf, sizeof buf, "X%03d", static_cast<int>(i - nt + 1));
      m.mnemonic = buf;
      m.description = "synthetic series";
    }
    m.tc = integrated ? TransformCode::Diff : TransformCode::Level;
    m.integration_order = integrated ? IntegrationOrder::I1 : IntegrationOrder::I0;
    out.panel.meta.push_back(std::move(m));
  }
  out.truth = std::move(g);
  return out;
}

/// Key-value configuration: `key = value` per line, '#' starts a comment.
/// target_names is a comma-separated list.
inline DgpConfig read_dgp_config(std::istream& in) {
  DgpConfig cfg;
  std::string line;
  int line_no = 0;
  auto as_index = [&](const std::string& v, const std::string& key) {
    Index out = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size())
      throw ConfigError("DGP config line " + std::to_string(line_no) + ": '" + key + "' expects an integer");
    return out;
  };
  auto as_double = [&](const std::string& v, const std::string& key) {
    if (v == "inf" || v == "Inf") return std::numeric_limits<double>::infinity();
    const std::string where = "DGP config line " + std::to_string(line_no);
    const double d = io::parse_value(v, where);
    if (std::isnan(d)) throw ConfigError(where + ": '" + key + "' expects a number");
    return d;
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = io::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("DGP config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = io::trim(line.substr(0, eq));
    const std::string val = io::trim(line.substr(eq + 1));
    if (key == "N") cfg.N = as_index(val, key);
    else if (key == "T") cfg.T = as_index(val, key);
    else if (key == "r1_true") cfg.r1_true = as_index(val, key);
    else if (key == "r0_true") cfg.r0_true = as_index(val, key);
    else if (key == "n_targets") cfg.n_targets = as_index(val, key);
    else if (key == "coint_strength") cfg.coint_strength = as_double(val, key);
    else if (key == "idio_ar") cfg.idio_ar = as_double(val, key);
    else if (key == "factor_ar") cfg.factor_ar = as_double(val, key);
    else if (key == "trend_drift") cfg.trend_drift = as_double(val, key);
    else if (key == "target_loading_floor") cfg.target_loading_floor = as_double(val, key);
    else if (key == "snr") cfg.snr = as_double(val, key);
    else if (key == "seed") {
      const auto [p, ec] = std::from_chars(val.data(), val.data() + val.size(), cfg.seed);
      if (ec != std::errc() || p != val.data() + val.size()) throw ConfigError("DGP config: 'seed' expects an unsigned integer");
    } else if (key == "start") cfg.start = Quarter::parse(val);
    else if (key == "target_names") {
      cfg.target_names.clear();
      for (auto& tok : io::split_line(val, ',')) cfg.target_names.push_back(io::trim(tok));
    } else {
      throw ConfigError("DGP config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

/// Writes every key in the format read_dgp_config accepts.
inline void write_dgp_config(std::ostream& out, const DgpConfig& cfg) {
  auto num = [](double v) { return std::isinf(v) ? std::string("inf") : io::format_double(v); };
  std::string names;
  for (std::size_t i = 0; i < cfg.target_names.size(); ++i) names += (i ? "," : "") + cfg.target_names[i];
  out << "N = " << cfg.N << "\nT = " << cfg.T << "\nr1_true = " << cfg.r1_true << "\nr0_true = " << cfg.r0_true
      << "\nn_targets = " << cfg.n_targets << "\ncoint_strength = " << num(cfg.coint_strength) << "\nidio_ar = " << num(cfg.idio_ar)
      << "\nfactor_ar = " << num(cfg.factor_ar) << "\ntrend_drift = " << num(cfg.trend_drift)
      << "\ntarget_loading_floor = " << num(cfg.target_loading_floor) << "\nsnr = " << num(cfg.snr) << "\nseed = " << cfg.seed
      << "\nstart = " << cfg.start.to_string() << "\ntarget_names = " << names << '\n';
}

inline DgpConfig load_dgp_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open DGP config '" + path + "'");
  return read_dgp_config(in);
}

}  // namespace fecm::sim
