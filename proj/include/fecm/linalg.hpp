#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "fecm/error.hpp"

namespace fecm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

struct OlsFit {
  Matrix coef;       // k x n
  Matrix residuals;  // T x n
};

/// Least squares of every column of `y` on the columns of `x`.
/// Throws NumericError when the design is rank deficient at a relative
/// pivot threshold of 1e-10.
inline OlsFit ols(const Matrix& x, const Matrix& y, const std::string& what = "regression") {
  if (x.rows() != y.rows())
    throw ContractError(what + ": design has " + std::to_string(x.rows()) + " rows, response " +
                        std::to_string(y.rows()));
  OlsFit fit;
  if (x.cols() == 0) {
    fit.coef = Matrix::Zero(0, y.cols());
    fit.residuals = y;
    return fit;
  }
  if (x.rows() < x.cols())
    throw NumericError(what + ": fewer observations than regressors");
  Eigen::ColPivHouseholderQR<Matrix> qr(x);
  qr.setThreshold(1e-10);
  if (qr.rank() < x.cols())
    throw NumericError(what + ": singular design matrix (rank " + std::to_string(qr.rank()) +
                       " < " + std::to_string(x.cols()) + ")");
  fit.coef = qr.solve(y);
  fit.residuals = y - x * fit.coef;
  return fit;
}

/// Residuals of `y` after projecting on the columns of `x`.
inline Matrix residualize(const Matrix& x, const Matrix& y) {
  if (x.cols() == 0) return y;
  return ols(x, y, "partialling out").residuals;
}

/// First differences along rows; result has one row fewer.
inline Matrix diff_rows(const Matrix& m) {
  if (m.rows() < 1) return Matrix(0, m.cols());
  return m.bottomRows(m.rows() - 1) - m.topRows(m.rows() - 1);
}

inline Matrix demean_columns(const Matrix& m) {
  if (m.rows() == 0) return m;
  return m.rowwise() - m.colwise().mean();
}

/// Orthonormal basis of the column space (thin Q of a pivoted QR, rank
/// truncated).
inline Matrix orthonormal_basis(const Matrix& a) {
  if (a.cols() == 0) return Matrix(a.rows(), 0);
  Eigen::ColPivHouseholderQR<Matrix> qr(a);
  qr.setThreshold(1e-12);
  const Index rank = qr.rank();
  Matrix q = qr.householderQ() * Matrix::Identity(a.rows(), rank);
  return q;
}

/// Canonical correlations between the column spaces of `a` and `b`,
/// descending. Columns are demeaned first unless `demean` is false.
inline Vector canonical_correlations(const Matrix& a, const Matrix& b, bool demean = true) {
  if (a.rows() != b.rows()) throw ContractError("canonical_correlations: row mismatch");
  const Matrix qa = orthonormal_basis(demean ? demean_columns(a) : a);
  const Matrix qb = orthonormal_basis(demean ? demean_columns(b) : b);
  if (qa.cols() == 0 || qb.cols() == 0) return Vector(0);
  Eigen::JacobiSVD<Matrix> svd(qa.transpose() * qb);
  Vector s = svd.singularValues();
  for (Index i = 0; i < s.size(); ++i) s(i) = std::min(1.0, s(i));
  return s;
}

/// Principal angles (radians, ascending) between two column spaces. Small
/// angles come from the sines, large ones from the cosines, so both ends are
/// accurate.
inline Vector principal_angles(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw ContractError("principal_angles: row mismatch");
  Matrix qa = orthonormal_basis(a);
  Matrix qb = orthonormal_basis(b);
  if (qa.cols() < qb.cols()) std::swap(qa, qb);
  const Index k = qb.cols();
  if (k == 0) return Vector(0);
  const Vector cosines = Eigen::JacobiSVD<Matrix>(qa.transpose() * qb).singularValues();  // descending
  const Matrix perp = qb - qa * (qa.transpose() * qb);
  Vector sines = Eigen::JacobiSVD<Matrix>(perp).singularValues();  // descending
  Vector out(k);
  for (Index i = 0; i < k; ++i) {
    const double c = std::clamp(cosines(i), 0.0, 1.0);
    const double s = std::clamp(sines(k - 1 - i), 0.0, 1.0);
    out(i) = c * c < 0.5 ? std::acos(c) : std::asin(s);
  }
  return out;
}

/// Flips the sign of column k of both `loadings` and `factors` so that the
/// first loading with magnitude above `tol` is positive.
inline void normalize_signs(Matrix& loadings, Matrix& factors, double tol = 1e-12) {
  for (Index k = 0; k < loadings.cols(); ++k) {
    for (Index i = 0; i < loadings.rows(); ++i) {
      if (std::abs(loadings(i, k)) > tol) {
        if (loadings(i, k) < 0) {
          loadings.col(k) *= -1.0;
          factors.col(k) *= -1.0;
        }
        break;
      }
    }
  }
}

inline Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

inline double min_eigenvalue(const Matrix& symmetric) {
  if (symmetric.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(symmetric), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

inline double log_det_spd(const Matrix& m, const std::string& what) {
  Eigen::LDLT<Matrix> ldlt(symmetrize(m));
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
    throw NumericError(what + ": covariance is not positive definite");
  const Vector d = ldlt.vectorD();
  double out = 0.0;
  for (Index i = 0; i < d.size(); ++i) {
    if (!(d(i) > 0.0)) throw NumericError(what + ": singular covariance");
    out += std::log(d(i));
  }
  return out;
}

}  // namespace fecm
