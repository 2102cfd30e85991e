#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include <boost/math/distributions/fisher_f.hpp>

#include "fecm/error.hpp"
#include "fecm/linalg.hpp"

namespace fecm::stats {

inline double mean(std::span<const double> x) {
  if (x.empty()) throw ContractError("mean of empty sample");
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

/// Sample standard deviation with divisor n - 1.
inline double sample_sd(std::span<const double> x) {
  if (x.size() < 2) throw ContractError("standard deviation needs at least two values");
  const double m = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

/// Quantile with linear interpolation between order statistics (Hyndman-Fan
/// type 7, the R and NumPy default).
inline double quantile(std::span<const double> x, double p) {
  if (x.empty()) throw ContractError("quantile of empty sample");
  std::vector<double> s(x.begin(), x.end());
  std::sort(s.begin(), s.end());
  const double h = (static_cast<double>(s.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, s.size() - 1);
  return s[lo] + (h - static_cast<double>(lo)) * (s[hi] - s[lo]);
}

inline double median(std::span<const double> x) { return quantile(x, 0.5); }

inline double iqr(std::span<const double> x) { return quantile(x, 0.75) - quantile(x, 0.25); }

enum class AdfDeterministic { None, Constant, ConstantTrend };

struct AdfResult {
  double statistic = 0.0;
  double critical_value_5pct = 0.0;
  int lags = 0;
  std::size_t nobs = 0;
  bool rejects_unit_root_5pct() const { return statistic < critical_value_5pct; }
};

/// MacKinnon (2010) response-surface 5% critical value for the single-series
/// Dickey-Fuller tau statistic.
inline double adf_critical_value_5pct(AdfDeterministic det, std::size_t nobs) {
  double b[4];
  switch (det) {
    case AdfDeterministic::None: b[0] = -1.94100; b[1] = -0.2686; b[2] = -3.365; b[3] = 31.223; break;
    case AdfDeterministic::Constant: b[0] = -2.86154; b[1] = -2.8903; b[2] = -4.234; b[3] = -40.040; break;
    case AdfDeterministic::ConstantTrend: b[0] = -3.41049; b[1] = -4.3904; b[2] = -9.036; b[3] = -45.374; break;
  }
  const double inv = 1.0 / static_cast<double>(nobs);
  return b[0] + b[1] * inv + b[2] * inv * inv + b[3] * inv * inv * inv;
}

/// Augmented Dickey-Fuller t-test with a fixed number of augmentation lags.
inline AdfResult adf_test(std::span<const double> y, int lags,
                          AdfDeterministic det = AdfDeterministic::Constant) {
  const auto n = static_cast<Index>(y.size());
  if (lags < 0) throw ContractError("adf_test: negative lag count");
  const Index start = lags + 1;
  const Index nobs = n - start;
  const Index ndet = det == AdfDeterministic::None ? 0 : (det == AdfDeterministic::Constant ? 1 : 2);
  const Index k = 1 + lags + ndet;
  if (nobs < k + 2) throw ContractError("adf_test: series too short");

  Matrix x(nobs, k);
  Vector dy(nobs);
  for (Index r = 0; r < nobs; ++r) {
    const Index t = start + r;
    dy(r) = y[t] - y[t - 1];
    x(r, 0) = y[t - 1];
    for (Index j = 1; j <= lags; ++j) x(r, j) = y[t - j] - y[t - j - 1];
    if (ndet >= 1) x(r, 1 + lags) = 1.0;
    if (ndet == 2) x(r, 2 + lags) = static_cast<double>(t);
  }
  const OlsFit fit = ols(x, dy, "adf_test");
  const double s2 = fit.residuals.squaredNorm() / static_cast<double>(nobs - k);
  const Matrix xtx_inv = (x.transpose() * x).inverse();
  AdfResult out;
  out.statistic = fit.coef(0, 0) / std::sqrt(s2 * xtx_inv(0, 0));
  out.lags = lags;
  out.nobs = static_cast<std::size_t>(nobs);
  out.critical_value_5pct = adf_critical_value_5pct(det, out.nobs);
  return out;
}

struct SeasonalityCheck {
  double f_statistic = 0.0;
  double p_value = 1.0;
  bool seasonal_at_5pct() const { return p_value < 0.05; }
};

/// F-test of joint significance of quarterly dummies in a regression of `x`
/// on a constant and three quarter indicators. `quarters[t]` is 1..4.
inline SeasonalityCheck quarterly_dummy_ftest(std::span<const double> x, std::span<const int> quarters) {
  if (x.size() != quarters.size()) throw ContractError("quarterly_dummy_ftest: length mismatch");
  const auto n = static_cast<Index>(x.size());
  if (n < 8) throw ContractError("quarterly_dummy_ftest: needs at least 8 observations");
  Matrix full(n, 4);
  Vector y(n);
  for (Index t = 0; t < n; ++t) {
    y(t) = x[t];
    full(t, 0) = 1.0;
    for (int q = 2; q <= 4; ++q) full(t, q - 1) = quarters[t] == q ? 1.0 : 0.0;
  }
  const double rss0 = (y.array() - y.mean()).square().sum();
  SeasonalityCheck out;
  double rss1 = 0.0;
  try {
    rss1 = ols(full, y, "seasonality").residuals.squaredNorm();
  } catch (const NumericError&) {
    return out;  // some quarter never observed: nothing to test
  }
  if (rss1 <= 1e-300 * std::max(1.0, rss0)) {
    out.f_statistic = rss0 > 0 ? INFINITY : 0.0;
    out.p_value = rss0 > 0 ? 0.0 : 1.0;
    return out;
  }
  const double df1 = 3.0;
  const double df2 = static_cast<double>(n - 4);
  out.f_statistic = ((rss0 - rss1) / df1) / (rss1 / df2);
  boost::math::fisher_f dist(df1, df2);
  out.p_value = boost::math::cdf(boost::math::complement(dist, std::max(0.0, out.f_statistic)));
  return out;
}

}  // namespace fecm::stats
