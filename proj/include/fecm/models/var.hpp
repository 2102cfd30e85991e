#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "fecm/error.hpp"
#include "fecm/linalg.hpp"
#include "fecm/models/spec.hpp"

namespace fecm {

/// y_t = mu + sum_k A_k y_{t-k} + sum_j B_j x_{t-j} + e_t
struct VarModel {
  Vector mu;
  std::vector<Matrix> A;  // lags 1..p, each n x n
  std::vector<Matrix> B;  // exogenous lags 1..q, each n x nx
  Matrix Sigma;           // ML residual covariance (divisor nobs)
  Index lags = 0;
  Index nobs = 0;

  Index dim() const { return mu.size(); }
  Index exog_dim() const { return B.empty() ? 0 : B.front().cols(); }
  Index exog_lags() const { return static_cast<Index>(B.size()); }
};

namespace detail {

/// Design for rows [start, T): constant, y lags 1..p, x lags 1..q.
inline Matrix var_design(const Matrix& y, Index p, const Matrix* exog, Index q, Index start) {
  const Index n = y.cols();
  const Index nx = exog ? exog->cols() : 0;
  const Index rows = y.rows() - start;
  Matrix x(rows, 1 + n * p + nx * q);
  for (Index r = 0; r < rows; ++r) {
    const Index t = start + r;
    x(r, 0) = 1.0;
    for (Index k = 1; k <= p; ++k) x.block(r, 1 + (k - 1) * n, 1, n) = y.row(t - k);
    for (Index j = 1; j <= q; ++j) x.block(r, 1 + n * p + (j - 1) * nx, 1, nx) = exog->row(t - j);
  }
  return x;
}

inline VarModel unpack_var(const Matrix& coef, Index n, Index p, Index nx, Index q) {
  VarModel m;
  m.mu = coef.row(0).transpose();
  for (Index k = 0; k < p; ++k) m.A.push_back(coef.block(1 + k * n, 0, n, n).transpose());
  for (Index j = 0; j < q; ++j) m.B.push_back(coef.block(1 + n * p + j * nx, 0, nx, n).transpose());
  m.lags = p;
  return m;
}

}  // namespace detail

/// Equation-by-equation OLS of a VAR(p) with constant. Exogenous regressors,
/// if any, enter with lags 1..q and must be row-aligned with `y`. The sample
/// starts at row `start` (default max(p, q)).
inline VarModel fit_var_fixed(const Matrix& y, Index p, const Matrix* exog = nullptr, Index q = 0,
                              std::optional<Index> start = std::nullopt) {
  if (p < 0) throw ContractError("fit_var_fixed: negative lag order");
  if (exog && exog->rows() != y.rows()) throw ContractError("fit_var_fixed: exogenous rows do not match");
  if (!exog) q = 0;
  const Index s = start.value_or(std::max(p, q));
  if (s < std::max(p, q)) throw ContractError("fit_var_fixed: sample start precedes available lags");
  const Index nx = exog ? exog->cols() : 0;
  const Matrix x = detail::var_design(y, p, exog, q, s);
  const Matrix yy = y.bottomRows(y.rows() - s);
  const OlsFit fit = ols(x, yy, "VAR(" + std::to_string(p) + ")");
  VarModel m = detail::unpack_var(fit.coef, y.cols(), p, nx, q);
  m.nobs = yy.rows();
  m.Sigma = symmetrize(fit.residuals.transpose() * fit.residuals / static_cast<double>(m.nobs));
  return m;
}

struct LagSelection {
  Index lags = 1;
  std::vector<double> criterion;  // index 0 <-> p = 1
};

/// Lag order minimising ln det Sigma(p) + penalty(p) over p = 1..max_lag on
/// the common sample that drops the first max_lag rows. Penalties per lag are
/// k = n (n + nx) coefficients: BIC p k ln T / T, HQ 2 p k ln ln T / T.
/// Exogenous regressors enter with the same lag order as y. Ties go to the
/// smaller p.
inline LagSelection select_lags(const Matrix& y, Index max_lag, LagCriterion criterion, const Matrix* exog = nullptr) {
  if (max_lag < 1) throw ContractError("select_lags: max_lag must be at least 1");
  LagSelection out;
  if (max_lag == 1) {
    out.lags = 1;
    return out;
  }
  const Index n = y.cols();
  const Index nx = exog ? exog->cols() : 0;
  const double t_eff = static_cast<double>(y.rows() - max_lag);
  const double per_lag = static_cast<double>(n * (n + nx));
  double best = INFINITY;
  for (Index p = 1; p <= max_lag; ++p) {
    const VarModel m = fit_var_fixed(y, p, exog, exog ? p : 0, max_lag);
    const double penalty = criterion == LagCriterion::BIC
                               ? static_cast<double>(p) * per_lag * std::log(t_eff) / t_eff
                               : 2.0 * static_cast<double>(p) * per_lag * std::log(std::log(t_eff)) / t_eff;
    const double ic = log_det_spd(m.Sigma, "select_lags") + penalty;
    out.criterion.push_back(ic);
    if (ic < best) {
      best = ic;
      out.lags = p;
    }
  }
  return out;
}

/// VAR on y (typically differenced data) with lag order chosen by the ModelSpec's
/// criterion, or `spec.fixed_lags` when set.
inline VarModel fit_var(const Matrix& y, const ModelSpec& spec, const Matrix* exog = nullptr) {
  const Index p_cap = spec.fixed_lags.value_or(spec.max_lag);
  if (y.rows() < y.cols() * p_cap + 10)
    throw ContractError("fit_var: " + std::to_string(y.rows()) + " observations are too few for " +
                        std::to_string(y.cols()) + " variables and " + std::to_string(p_cap) + " lags");
  const Index p = spec.fixed_lags ? *spec.fixed_lags : select_lags(y, spec.max_lag, spec.lag_criterion, exog).lags;
  return fit_var_fixed(y, p, exog, exog ? p : 0);
}

/// Univariate autoregression with constant.
inline VarModel fit_ar(const Vector& y, const ModelSpec& spec, const Matrix* exog = nullptr) {
  if (y.size() < spec.max_lag + 10) throw ContractError("fit_ar: series too short for max_lag");
  const double centered = (y.array() - y.mean()).square().sum();
  if (!(centered > 1e-24 * std::max(1.0, y.squaredNorm()))) throw NumericError("fit_ar: series has zero variance");
  return fit_var(Matrix(y), spec, exog);
}

/// Iterated forecasts for steps 1..h. `history` holds the observed y rows
/// (at least p), `exog_history` the observed exogenous rows aligned with it,
/// and `exog_future` the exogenous path for steps 1..h-1 (row s is the value
/// at step s+1; only the first h-1 rows are used).
inline Matrix forecast_var(const VarModel& m, const Matrix& history, Index h, const Matrix* exog_history = nullptr,
                           const Matrix* exog_future = nullptr) {
  const Index n = m.dim();
  const Index p = m.lags;
  const Index q = m.exog_lags();
  if (history.rows() < p) throw ContractError("forecast_var: history shorter than the lag order");
  if (q > 0) {
    if (!exog_history || exog_history->rows() < q) throw ContractError("forecast_var: exogenous history too short");
    if (h > 1 && (!exog_future || exog_future->rows() < h - 1))
      throw ContractError("forecast_var: exogenous path too short");
  }
  Matrix ext(p + h, n);
  if (p > 0) ext.topRows(p) = history.bottomRows(p);
  Matrix xext;
  if (q > 0) {
    xext.resize(q + h, m.exog_dim());
    xext.topRows(q) = exog_history->bottomRows(q);
    if (h > 1) xext.middleRows(q, h - 1) = exog_future->topRows(h - 1);
  }
  Matrix out(h, n);
  for (Index s = 0; s < h; ++s) {
    Vector yhat = m.mu;
    for (Index k = 1; k <= p; ++k) yhat += m.A[static_cast<std::size_t>(k - 1)] * ext.row(p + s - k).transpose();
    for (Index j = 1; j <= q; ++j) yhat += m.B[static_cast<std::size_t>(j - 1)] * xext.row(q + s - j).transpose();
    ext.row(p + s) = yhat.transpose();
    out.row(s) = yhat.transpose();
  }
  return out;
}

}  // namespace fecm
