#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "fecm/error.hpp"
#include "fecm/linalg.hpp"

namespace fecm {

enum class Deterministic { None, UnrestrictedConstant };

/// Stationary regressors entering every VECM equation with lags 1..lags.
/// `values` is row-aligned with the level data; rows before `first_valid`
/// are ignored.
struct ExogenousBlock {
  Matrix values;
  Index lags = 0;
  Index first_valid = 0;

  Index dim() const { return values.cols(); }
  bool empty() const { return values.cols() == 0 || lags == 0; }
};

/// Reduced-rank regression moments of
///   dy_t = Pi y_{t-1} + sum_{k<p} Phi_k dy_{t-k} + sum_j G_j x_{t-j} + mu + e_t.
struct JohansenResult {
  Vector eigenvalues;   // descending, in [0, 1)
  Matrix eigenvectors;  // columns v with v' S11 v = I, ordered like eigenvalues
  Matrix S00, S01, S11;
  Matrix R0, R1;        // residuals of dy_t and y_{t-1} on the short-run block
  Matrix Z0, Z1, Z2;    // dy_t, y_{t-1}, short-run regressors
  Index nobs = 0;
  Index start = 0;      // first level row used as t
};

namespace detail {

inline Index vecm_start(Index p, const ExogenousBlock* exog) {
  Index start = std::max<Index>(p, 1);
  if (exog && !exog->empty()) start = std::max(start, exog->first_valid + exog->lags);
  return start;
}

inline Matrix short_run_design(const Matrix& levels, Index p, Deterministic det, const ExogenousBlock* exog, Index start) {
  const Index m = levels.cols();
  const Index rows = levels.rows() - start;
  const Index ndet = det == Deterministic::UnrestrictedConstant ? 1 : 0;
  const Index nx = exog && !exog->empty() ? exog->dim() : 0;
  const Index q = nx > 0 ? exog->lags : 0;
  Matrix z2(rows, ndet + m * (p - 1) + nx * q);
  for (Index r = 0; r < rows; ++r) {
    const Index t = start + r;
    Index c = 0;
    if (ndet) z2(r, c++) = 1.0;
    for (Index k = 1; k < p; ++k, c += m) z2.block(r, c, 1, m) = levels.row(t - k) - levels.row(t - k - 1);
    for (Index j = 1; j <= q; ++j, c += nx) z2.block(r, c, 1, nx) = exog->values.row(t - j);
  }
  return z2;
}

}  // namespace detail

inline JohansenResult johansen(const Matrix& levels, Index p, Deterministic det = Deterministic::UnrestrictedConstant,
                               const ExogenousBlock* exog = nullptr) {
  const Index m = levels.cols();
  if (p < 1) throw ContractError("johansen: lag order p must be at least 1");
  if (exog && !exog->empty() && exog->values.rows() != levels.rows())
    throw ContractError("johansen: exogenous block is not aligned with the levels");
  JohansenResult j;
  j.start = detail::vecm_start(p, exog);
  j.nobs = levels.rows() - j.start;
  if (levels.rows() < m * p + 10 || j.nobs < m * p + 2)
    throw ContractError("johansen: " + std::to_string(levels.rows()) + " observations are too few for dimension " +
                        std::to_string(m) + " and p = " + std::to_string(p));
  const Index rows = j.nobs;
  j.Z0 = levels.bottomRows(rows) - levels.middleRows(j.start - 1, rows);
  j.Z1 = levels.middleRows(j.start - 1, rows);
  j.Z2 = detail::short_run_design(levels, p, det, exog, j.start);
  j.R0 = residualize(j.Z2, j.Z0);
  j.R1 = residualize(j.Z2, j.Z1);
  const double tn = static_cast<double>(rows);
  j.S00 = symmetrize(j.R0.transpose() * j.R0 / tn);
  j.S11 = symmetrize(j.R1.transpose() * j.R1 / tn);
  j.S01 = j.R0.transpose() * j.R1 / tn;

  Eigen::LLT<Matrix> llt00(j.S00);
  Eigen::LLT<Matrix> llt11(j.S11);
  const double scale00 = std::max(1e-300, j.S00.trace());
  const double scale11 = std::max(1e-300, j.S11.trace());
  if (llt00.info() != Eigen::Success || llt11.info() != Eigen::Success ||
      llt00.matrixL().toDenseMatrix().diagonal().minCoeff() <= 1e-12 * std::sqrt(scale00) ||
      llt11.matrixL().toDenseMatrix().diagonal().minCoeff() <= 1e-12 * std::sqrt(scale11))
    throw NumericError("johansen: singular product-moment matrices");
  const Matrix a = symmetrize(j.S01.transpose() * llt00.solve(j.S01));
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> ges(a, j.S11);
  if (ges.info() != Eigen::Success) throw NumericError("johansen: eigenproblem failed");
  j.eigenvalues.resize(m);
  j.eigenvectors.resize(m, m);
  for (Index i = 0; i < m; ++i) {
    j.eigenvalues(i) = std::clamp(ges.eigenvalues()(m - 1 - i), 0.0, 1.0 - 1e-15);
    j.eigenvectors.col(i) = ges.eigenvectors().col(m - 1 - i);
  }
  return j;
}

/// dy_t = mu + alpha beta' y_{t-1} + sum_{k=1}^{p-1} Phi_k dy_{t-k}
///        + sum_{j=1}^{q} Gamma_j x_{t-j} + e_t
/// (alpha here is the negative of the alpha in the minus-sign form).
struct VecmModel {
  Vector mu;
  Matrix alpha;                    // m x r
  Matrix beta;                     // m x r, leading r x r block = I
  std::vector<Matrix> Phi;         // p - 1 matrices, m x m
  std::vector<Matrix> exog_coeffs; // q matrices, m x nx
  Matrix Sigma;
  Index rank = 0;
  Index lags = 1;                  // p, the order of the implied level VAR
  Index nobs = 0;
  Deterministic det = Deterministic::UnrestrictedConstant;
  Vector eigenvalues;

  Index dim() const { return alpha.rows(); }
  Matrix pi() const { return rank == 0 ? Matrix::Zero(dim(), dim()) : Matrix(alpha * beta.transpose()); }
};

/// Normalizes beta so its leading r x r block is the identity.
inline Matrix normalize_beta(const Matrix& beta) {
  const Index r = beta.cols();
  if (r == 0) return beta;
  const Matrix lead = beta.topRows(r);
  Eigen::FullPivLU<Matrix> lu(lead);
  if (!lu.isInvertible() || std::abs(lu.determinant()) < 1e-12 * std::pow(lead.norm(), static_cast<double>(r)))
    throw NumericError("fit_vecm: leading block of the cointegrating matrix is singular; reorder the variables");
  return beta * lu.inverse();
}

/// Johansen reduced-rank estimation of a VECM with cointegrating rank r.
inline VecmModel fit_vecm(const Matrix& levels, Index r, Index p, Deterministic det = Deterministic::UnrestrictedConstant,
                          const ExogenousBlock* exog = nullptr, const JohansenResult* precomputed = nullptr) {
  const Index m = levels.cols();
  if (r < 0 || r > m) throw ContractError("fit_vecm: rank " + std::to_string(r) + " outside 0.." + std::to_string(m));
  const JohansenResult j = precomputed ? *precomputed : johansen(levels, p, det, exog);
  VecmModel model;
  model.rank = r;
  model.lags = p;
  model.det = det;
  model.nobs = j.nobs;
  model.eigenvalues = j.eigenvalues;
  model.beta = normalize_beta(j.eigenvectors.leftCols(r));

  Matrix x(j.nobs, r + j.Z2.cols());
  x.leftCols(r) = j.Z1 * model.beta;
  x.rightCols(j.Z2.cols()) = j.Z2;
  const OlsFit fit = ols(x, j.Z0, "VECM short-run regression");
  model.alpha = fit.coef.topRows(r).transpose();
  Index c = r;
  if (det == Deterministic::UnrestrictedConstant) model.mu = fit.coef.row(c++).transpose();
  else model.mu = Vector::Zero(m);
  for (Index k = 1; k < p; ++k, c += m) model.Phi.push_back(fit.coef.middleRows(c, m).transpose());
  if (exog && !exog->empty())
    for (Index q = 0; q < exog->lags; ++q, c += exog->dim()) model.exog_coeffs.push_back(fit.coef.middleRows(c, exog->dim()).transpose());
  model.Sigma = symmetrize(fit.residuals.transpose() * fit.residuals / static_cast<double>(j.nobs));
  return model;
}

/// Iterated forecasts of dy for steps 1..h from the last p rows of
/// `level_history`. Exogenous rows follow forecast_var's convention: the last
/// q rows of `exog_history` and rows 0..h-2 of `exog_future`.
inline Matrix forecast_vecm(const VecmModel& model, const Matrix& level_history, Index h,
                            const Matrix* exog_history = nullptr, const Matrix* exog_future = nullptr) {
  const Index m = model.dim();
  const Index p = model.lags;
  const Index q = static_cast<Index>(model.exog_coeffs.size());
  if (level_history.rows() < p) throw ContractError("forecast_vecm: history shorter than the lag order");
  if (q > 0) {
    if (!exog_history || exog_history->rows() < q) throw ContractError("forecast_vecm: exogenous history too short");
    if (h > 1 && (!exog_future || exog_future->rows() < h - 1))
      throw ContractError("forecast_vecm: exogenous path too short");
  }
  Matrix lv(p + h, m);
  lv.topRows(p) = level_history.bottomRows(p);
  Matrix xext;
  if (q > 0) {
    xext.resize(q + h, model.exog_coeffs.front().cols());
    xext.topRows(q) = exog_history->bottomRows(q);
    if (h > 1) xext.middleRows(q, h - 1) = exog_future->topRows(h - 1);
  }
  const Matrix pi = model.pi();
  Matrix out(h, m);
  for (Index s = 0; s < h; ++s) {
    const Index t = p - 1 + s;  // row of y_t in lv
    Vector dy = model.mu + pi * lv.row(t).transpose();
    for (Index k = 1; k < p; ++k)
      dy += model.Phi[static_cast<std::size_t>(k - 1)] * (lv.row(t + 1 - k) - lv.row(t - k)).transpose();
    for (Index j = 1; j <= q; ++j) dy += model.exog_coeffs[static_cast<std::size_t>(j - 1)] * xext.row(q + s - j).transpose();
    lv.row(t + 1) = lv.row(t) + dy.transpose();
    out.row(s) = dy.transpose();
  }
  return out;
}

/// Asymptotic standard errors of the free rows of the identity-normalized
/// beta: Cov(vec(beta_2')) = (R1_2' R1_2)^{-1} kron (alpha' Sigma^{-1} alpha)^{-1},
/// where R1_2 are the last m - r columns of R1. Rows of the identity block are 0.
inline Matrix beta_standard_errors(const JohansenResult& j, const VecmModel& model) {
  const Index m = model.dim();
  const Index r = model.rank;
  Matrix se = Matrix::Zero(m, r);
  if (r == 0 || r == m) return se;
  const Matrix r12 = j.R1.rightCols(m - r);
  const Matrix a = (r12.transpose() * r12).inverse();
  const Matrix b = (model.alpha.transpose() * model.Sigma.ldlt().solve(model.alpha)).inverse();
  for (Index row = 0; row < m - r; ++row)
    for (Index col = 0; col < r; ++col) se(r + row, col) = std::sqrt(std::max(0.0, a(row, row) * b(col, col)));
  return se;
}

// ---------------------------------------------------------------------------
// Rank selection

/// 5% trace critical values for the unrestricted-constant case, indexed by
/// m - r = 1..12 (MacKinnon-Haug-Michelis).
inline constexpr std::array<double, 12> kTraceCritical5pct = {3.8415,   15.4943,  29.7961,  47.8545,  69.8189,  95.7542,
                                                            125.6185, 159.5290, 197.3772, 239.2468, 285.1402, 334.9795};

struct TraceTestResult {
  Index rank = 0;
  std::vector<double> statistics;       // for H0: rank <= r, r = 0..m-1
  std::vector<double> critical_values;  // matching 5% values
};

inline std::vector<double> trace_statistics(const JohansenResult& j) {
  const Index m = j.eigenvalues.size();
  std::vector<double> out;
  for (Index r = 0; r < m; ++r) {
    double s = 0.0;
    for (Index i = r; i < m; ++i) s += std::log(1.0 - j.eigenvalues(i));
    out.push_back(-static_cast<double>(j.nobs) * s);
  }
  return out;
}

/// Sequential trace test from r = 0 upwards at the 5% level; returns the
/// first r not rejected (m if all are).
inline TraceTestResult johansen_trace_rank(const Matrix& levels, Index p,
                                           Deterministic det = Deterministic::UnrestrictedConstant,
                                           const ExogenousBlock* exog = nullptr) {
  const Index m = levels.cols();
  if (m < 1 || m > static_cast<Index>(kTraceCritical5pct.size()))
    throw UnsupportedDimension("johansen_trace_rank: critical values cover 1..12 variables, got " + std::to_string(m));
  if (det != Deterministic::UnrestrictedConstant)
    throw ContractError("johansen_trace_rank: critical values are embedded for the unrestricted-constant case only");
  const JohansenResult j = johansen(levels, p, det, exog);
  TraceTestResult out;
  out.statistics = trace_statistics(j);
  out.rank = m;
  bool decided = false;
  for (Index r = 0; r < m; ++r) {
    out.critical_values.push_back(kTraceCritical5pct[static_cast<std::size_t>(m - r - 1)]);
    if (!decided && out.statistics[static_cast<std::size_t>(r)] < out.critical_values.back()) {
      out.rank = r;
      decided = true;
    }
  }
  return out;
}

struct RankSelection {
  Index rank = 0;
  std::vector<double> criterion;  // r = 0..m
};

/// Rank minimising ln det Sigma(r) + r (2m - r) ln T / T for the lag-free
/// reduced-rank regression dy_t = alpha beta' y_{t-1} [+ mu] + e_t.
inline RankSelection cheng_phillips_rank(const Matrix& levels, Deterministic det = Deterministic::UnrestrictedConstant) {
  const Index m = levels.cols();
  if (m < 1) throw ContractError("cheng_phillips_rank: no variables");
  const JohansenResult j = johansen(levels, 1, det);
  const double tn = static_cast<double>(j.nobs);
  RankSelection out;
  double ld = log_det_spd(j.S00, "cheng_phillips_rank");
  double best = INFINITY;
  for (Index r = 0; r <= m; ++r) {
    if (r > 0) ld += std::log(1.0 - j.eigenvalues(r - 1));
    const double ic = ld + static_cast<double>(r * (2 * m - r)) * std::log(tn) / tn;
    out.criterion.push_back(ic);
    if (ic < best) {
      best = ic;
      out.rank = r;
    }
  }
  return out;
}

}  // namespace fecm
