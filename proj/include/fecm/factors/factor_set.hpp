#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "fecm/data/io.hpp"
#include "fecm/data/level_panel.hpp"
#include "fecm/data/standardize.hpp"
#include "fecm/factors/criteria.hpp"
#include "fecm/factors/pca.hpp"
#include "fecm/stats.hpp"

namespace fecm {

/// How residual-PCA factors relate to the requested stationary count r0.
enum class ResidualMode {
  Append,   // r0 differenced-panel PCs plus r_extra residual PCs
  Include,  // r0 - r_extra differenced-panel PCs plus r_extra residual PCs
};

struct FactorOptions {
  std::optional<Index> r1;  // unset: information criterion
  std::optional<Index> r0;
  Index r_max_i1 = 8;
  Index r_max_i0 = 8;
  bool detrend = true;
  Index r_extra = 0;
  ResidualMode residual_mode = ResidualMode::Append;
};

/// Everything needed to compute factor values for a longer sample with the
/// loadings and scalings estimated on an earlier one.
struct FactorProjection {
  LevelDeterministics deterministics;
  Matrix loadings_i1;
  ColumnScaling diff_scaling;
  Matrix loadings_i0;     // differenced-panel PCs only
  Matrix loadings_i1c;    // differenced-panel PCs that are cumulated
  Vector residual_mean;
  Vector residual_sd;
  Matrix residual_loadings;
};

/// f_i1 is identified net of the level deterministics. Error-correction
/// models use f_i1_levels instead: the same loadings applied to the levels
/// with only the intercept removed, so a common drift stays in the factor
/// and the target-factor relation has no deterministic trend left over.
/// With detrend off the two coincide. f_i1_cumulated keeps the drift the
/// same way (the difference means are not removed before projecting).
struct FactorSet {
  Matrix f_i1;            // T x r1, F'F/T^2 = I
  Matrix f_i1_levels;     // T x r1, trend-restored f_i1
  Matrix f_i0;            // (T-1) x r0 (including residual PCs)
  Matrix f_i1_cumulated;  // T x r1, cumulated differenced-panel factors with drift
  Matrix loadings_i1;     // N x r1
  Matrix loadings_i0;     // N x (differenced-panel part of r0)
  Index r1 = 0;
  Index r0 = 0;
  CriterionTrace trace_i1;
  CriterionTrace trace_i0;
  bool residual_degenerate = false;
  FactorProjection projection;
};

namespace detail {

inline Matrix project_on_loadings(const Matrix& x, const Matrix& loadings) {
  if (loadings.cols() == 0) return Matrix(x.rows(), 0);
  const Matrix gram = loadings.transpose() * loadings;
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(gram);
  return x * loadings * cod.pseudoInverse();
}

inline Matrix remove_intercept(const Matrix& levels, const LevelDeterministics& det) {
  return levels.rowwise() - det.coef.row(0);
}

/// Differences scaled by the frozen sd but not demeaned.
inline Matrix scale_only(const Matrix& diffs, const ColumnScaling& s) {
  return diffs.array().rowwise() / s.sd.transpose().array();
}

inline Matrix cumulate_rows_with_zero(const Matrix& f) {
  Matrix out = Matrix::Zero(f.rows() + 1, f.cols());
  for (Index t = 0; t < f.rows(); ++t) out.row(t + 1) = out.row(t) + f.row(t);
  return out;
}

}  // namespace detail

/// Extracts the I(1), I(0) and cumulated factor blocks from a prepared sample.
inline FactorSet estimate_factor_set(const PreparedSample& sample, const FactorOptions& opt) {
  const Matrix& levels = sample.levels.values;
  const Index t = levels.rows();
  const Index n = levels.cols();
  if (t < 8) throw ContractError("estimate_factor_set: at least 8 observations required");
  FactorSet fs;

  const LevelDeterministics det = fit_level_deterministics(levels, opt.detrend);
  const Matrix centered = det.remove(levels);
  const Index r_cap = std::min(t - 1, n);
  fs.trace_i1 = select_num_i1_factors(centered, std::min(opt.r_max_i1, r_cap));
  fs.r1 = opt.r1 ? *opt.r1 : fs.trace_i1.selected;
  LevelFactors lf = extract_level_factors(levels, fs.r1, opt.detrend);
  fs.f_i1 = lf.pca.factors;
  fs.loadings_i1 = lf.pca.loadings;
  fs.f_i1_levels = detail::project_on_loadings(detail::remove_intercept(levels, det), fs.loadings_i1);

  const ColumnScaling scaling = column_scaling(sample.diffs, &sample.levels.meta);
  const Matrix z = apply_scaling(sample.diffs, scaling);
  fs.trace_i0 = select_num_i0_factors(z, std::min(opt.r_max_i0, std::min(z.rows(), n)));
  fs.r0 = opt.r0 ? *opt.r0 : fs.trace_i0.selected;

  Index from_diffs = fs.r0;
  Index extra = opt.r_extra;
  if (opt.residual_mode == ResidualMode::Include) {
    if (extra > fs.r0) throw ConfigError("residual factor count exceeds r0");
    from_diffs = fs.r0 - extra;
  } else {
    fs.r0 += extra;
  }
  const PcaResult d = extract_diff_factors(z, from_diffs);
  fs.loadings_i0 = d.loadings;
  const PcaResult d_cum = extract_diff_factors(z, fs.r1);
  fs.f_i1_cumulated = detail::cumulate_rows_with_zero(
      detail::project_on_loadings(detail::scale_only(sample.diffs, scaling), d_cum.loadings));

  ResidualFactors rf;
  if (extra > 0) {
    rf = residual_factors(lf.centered, fs.f_i1, extra);
    fs.residual_degenerate = rf.degenerate;
  }
  fs.f_i0.resize(t - 1, fs.r0);
  fs.f_i0.leftCols(from_diffs) = d.factors;
  if (extra > 0) fs.f_i0.rightCols(extra) = rf.factors.bottomRows(t - 1);

  FactorProjection& p = fs.projection;
  p.deterministics = det;
  p.loadings_i1 = fs.loadings_i1;
  p.diff_scaling = scaling;
  p.loadings_i0 = d.loadings;
  p.loadings_i1c = d_cum.loadings;
  if (extra > 0) {
    const Matrix resid = lf.centered - fs.f_i1 * fs.loadings_i1.transpose();
    p.residual_mean = resid.colwise().mean().transpose();
    p.residual_sd = rf.residual_sd;
    p.residual_loadings = rf.loadings;
  }
  return fs;
}

/// Factor values for `sample` (which extends the estimation sample) using
/// frozen loadings and scalings. On the estimation sample itself this
/// reproduces the estimated factors.
inline FactorSet project_factor_set(const FactorSet& fitted, const PreparedSample& sample) {
  const FactorProjection& p = fitted.projection;
  FactorSet fs = fitted;
  const Matrix centered = p.deterministics.remove(sample.levels.values);
  fs.f_i1 = detail::project_on_loadings(centered, p.loadings_i1);
  fs.f_i1_levels = detail::project_on_loadings(detail::remove_intercept(sample.levels.values, p.deterministics),
                                               p.loadings_i1);
  const Matrix z = apply_scaling(sample.diffs, p.diff_scaling);
  const Matrix d = detail::project_on_loadings(z, p.loadings_i0);
  fs.f_i1_cumulated = detail::cumulate_rows_with_zero(
      detail::project_on_loadings(detail::scale_only(sample.diffs, p.diff_scaling), p.loadings_i1c));
  const Index extra = p.residual_loadings.cols();
  fs.f_i0.resize(z.rows(), d.cols() + extra);
  fs.f_i0.leftCols(d.cols()) = d;
  if (extra > 0) {
    Matrix resid = centered - fs.f_i1 * p.loadings_i1.transpose();
    resid = resid.rowwise() - p.residual_mean.transpose();
    for (Index j = 0; j < resid.cols(); ++j) {
      if (p.residual_sd(j) > 0) resid.col(j) /= p.residual_sd(j);
      else resid.col(j).setZero();
    }
    fs.f_i0.rightCols(extra) = detail::project_on_loadings(resid, p.residual_loadings).bottomRows(z.rows());
  }
  return fs;
}

/// ADF (constant, one augmentation lag) on each idiosyncratic level residual.
/// Diagnostic only; nothing is enforced.
inline std::vector<stats::AdfResult> idiosyncratic_adf(const PreparedSample& sample, const FactorSet& fs) {
  const Matrix centered = fs.projection.deterministics.remove(sample.levels.values);
  const Matrix resid = centered - fs.f_i1 * fs.loadings_i1.transpose();
  std::vector<stats::AdfResult> out;
  for (Index j = 0; j < resid.cols(); ++j) {
    const std::vector<double> col = column_vector(resid, j);
    try {
      out.push_back(stats::adf_test(col, 1, stats::AdfDeterministic::Constant));
    } catch (const std::exception&) {
      out.push_back(stats::AdfResult{});
    }
  }
  return out;
}

/// Delimited export: date, F1_k (I(1)), F1C_k (cumulated), F0_k (I(0); NA
/// in the first row).
inline void write_factor_set(std::ostream& out, const std::vector<Quarter>& dates, const FactorSet& fs) {
  const Index t = fs.f_i1.rows();
  if (static_cast<std::size_t>(t) != dates.size()) throw ContractError("write_factor_set: date count mismatch");
  std::vector<std::string> names;
  Matrix all(t, fs.f_i1.cols() + fs.f_i1_cumulated.cols() + fs.f_i0.cols());
  Index c = 0;
  for (Index k = 0; k < fs.f_i1.cols(); ++k, ++c) {
    names.push_back("F1_" + std::to_string(k + 1));
    all.col(c) = fs.f_i1.col(k);
  }
  for (Index k = 0; k < fs.f_i1_cumulated.cols(); ++k, ++c) {
    names.push_back("F1C_" + std::to_string(k + 1));
    all.col(c) = fs.f_i1_cumulated.col(k);
  }
  for (Index k = 0; k < fs.f_i0.cols(); ++k, ++c) {
    names.push_back("F0_" + std::to_string(k + 1));
    all(0, c) = std::numeric_limits<double>::quiet_NaN();
    all.col(c).tail(t - 1) = fs.f_i0.col(k);
  }
  io::write_dated_matrix(out, dates, names, all);
}

}  // namespace fecm
