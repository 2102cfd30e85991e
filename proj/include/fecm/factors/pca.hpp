#pragma once

#include <cmath>

#include <Eigen/SVD>

#include "fecm/error.hpp"
#include "fecm/linalg.hpp"

namespace fecm {

/// Principal components of a prepared T x N matrix.
///
/// Factors satisfy F'F / c = I where c is `normalization` (T for stationary
/// panels, T^2 for level panels); loadings are X'F / c. `eigenvalues` holds
/// every eigenvalue of XX' / (c N), descending. Components whose singular
/// value is numerically zero are returned as zero columns.
struct PcaResult {
  Matrix factors;
  Matrix loadings;
  Vector eigenvalues;
};

inline Eigen::BDCSVD<Matrix> thin_svd(const Matrix& x) {
  return Eigen::BDCSVD<Matrix>(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
}

inline PcaResult principal_components(const Matrix& x, Index r, double normalization) {
  const Index t = x.rows();
  const Index n = x.cols();
  if (r < 0 || r > std::min(t, n))
    throw ContractError("principal_components: requested " + std::to_string(r) + " factors from a " +
                        std::to_string(t) + "x" + std::to_string(n) + " panel");
  PcaResult out;
  out.factors = Matrix::Zero(t, r);
  out.loadings = Matrix::Zero(n, r);
  if (t == 0 || n == 0) {
    out.eigenvalues = Vector(0);
    return out;
  }
  const auto svd = thin_svd(x);
  const Vector s = svd.singularValues();
  out.eigenvalues = s.array().square() / (normalization * static_cast<double>(n));
  const double scale = std::sqrt(normalization);
  const double tiny = 1e-10 * (s.size() > 0 ? s(0) : 0.0);
  for (Index k = 0; k < r; ++k) {
    if (!(s(k) > tiny)) continue;
    out.factors.col(k) = scale * svd.matrixU().col(k);
    out.loadings.col(k) = x.transpose() * out.factors.col(k) / normalization;
  }
  normalize_signs(out.loadings, out.factors);
  return out;
}

/// Linear deterministic terms removed from level series before PCA.
struct LevelDeterministics {
  bool trend = true;
  Matrix coef;  // rows: intercept[, slope]; one column per series

  Matrix design(Index first_t, Index rows) const {
    Matrix d(rows, trend ? 2 : 1);
    for (Index i = 0; i < rows; ++i) {
      d(i, 0) = 1.0;
      if (trend) d(i, 1) = static_cast<double>(first_t + i);
    }
    return d;
  }
  Matrix remove(const Matrix& levels) const { return levels - design(0, levels.rows()) * coef; }
};

inline LevelDeterministics fit_level_deterministics(const Matrix& levels, bool detrend) {
  LevelDeterministics det;
  det.trend = detrend;
  det.coef = ols(det.design(0, levels.rows()), levels, "level detrending").coef;
  return det;
}

struct LevelFactors {
  PcaResult pca;
  LevelDeterministics deterministics;
  Matrix centered;  // levels with deterministics removed
};

/// I(1) factors from a level panel: deterministics removed by OLS (constant,
/// plus a linear trend when `detrend`), then PCA with F'F / T^2 = I.
inline LevelFactors extract_level_factors(const Matrix& levels, Index r1, bool detrend = true) {
  if (r1 > std::min(levels.rows(), levels.cols()))
    throw ContractError("extract_level_factors: r1 = " + std::to_string(r1) + " exceeds min(T, N)");
  LevelFactors out;
  out.deterministics = fit_level_deterministics(levels, detrend);
  out.centered = out.deterministics.remove(levels);
  const double t = static_cast<double>(levels.rows());
  out.pca = principal_components(out.centered, r1, t * t);
  return out;
}

/// I(0) factors from an already standardized stationary panel, F'F / T = I.
inline PcaResult extract_diff_factors(const Matrix& standardized_diffs, Index r0) {
  if (r0 > std::min(standardized_diffs.rows(), standardized_diffs.cols()))
    throw ContractError("extract_diff_factors: r0 = " + std::to_string(r0) + " exceeds min(T, N)");
  return principal_components(standardized_diffs, r0, static_cast<double>(standardized_diffs.rows()));
}

struct ResidualFactors {
  Matrix factors;   // T x r_extra
  Matrix loadings;  // N x r_extra
  Vector residual_sd;
  bool degenerate = false;
};

/// Extra stationary factors: each level series is regressed on the I(1)
/// factors and the top `r_extra` principal components of the standardized
/// residuals are returned. Reports `degenerate` (and zero factors) when the
/// residuals carry no variance.
inline ResidualFactors residual_factors(const Matrix& centered_levels, const Matrix& f_i1, Index r_extra) {
  ResidualFactors out;
  const Index t = centered_levels.rows();
  const Index n = centered_levels.cols();
  out.factors = Matrix::Zero(t, r_extra);
  out.loadings = Matrix::Zero(n, r_extra);
  out.residual_sd = Vector::Zero(n);
  if (r_extra == 0) return out;
  if (f_i1.cols() == 0) throw ContractError("residual_factors: no I(1) factors supplied");
  if (r_extra > std::min(t, n)) throw ContractError("residual_factors: too many factors requested");
  const Matrix gram = f_i1.transpose() * f_i1;
  Eigen::LDLT<Matrix> ldlt(gram);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || ldlt.vectorD().minCoeff() <= 1e-12 * gram.trace())
    throw NumericError("residual_factors: singular factor cross-product");
  const Matrix resid = centered_levels - f_i1 * ldlt.solve(f_i1.transpose() * centered_levels);

  const double panel_scale = std::max(1e-300, centered_levels.squaredNorm() / static_cast<double>(t * n));
  Matrix z = demean_columns(resid);
  bool any = false;
  for (Index j = 0; j < n; ++j) {
    const double var = z.col(j).squaredNorm() / static_cast<double>(std::max<Index>(1, t - 1));
    if (var > 1e-20 * panel_scale) {
      out.residual_sd(j) = std::sqrt(var);
      z.col(j) /= out.residual_sd(j);
      any = true;
    } else {
      z.col(j).setZero();
    }
  }
  if (!any) {
    out.degenerate = true;
    return out;
  }
  PcaResult pca = principal_components(z, r_extra, static_cast<double>(t));
  out.factors = std::move(pca.factors);
  out.loadings = std::move(pca.loadings);
  return out;
}

/// Principal components of the differenced panel, cumulated into I(1)
/// proxies: a leading zero row followed by running sums (T rows total).
inline Matrix cumulate_diff_factors(const Matrix& standardized_diffs, Index r1) {
  const PcaResult pca = extract_diff_factors(standardized_diffs, r1);
  Matrix out = Matrix::Zero(standardized_diffs.rows() + 1, r1);
  for (Index t = 0; t < pca.factors.rows(); ++t) out.row(t + 1) = out.row(t) + pca.factors.row(t);
  return out;
}

}  // namespace fecm
