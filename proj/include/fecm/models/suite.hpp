#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fecm/error.hpp"
#include "fecm/linalg.hpp"
#include "fecm/models/spec.hpp"
#include "fecm/models/var.hpp"
#include "fecm/models/vecm.hpp"

namespace fecm {

/// Model inputs for one estimation sample. Targets are in modelling scale
/// (logs where the log policy applies); levels and I(1) factors share the
/// row index, stationary factors are aligned with first differences (row s
/// is time s + 1).
struct ModelInputs {
  std::vector<std::string> targets;
  Matrix y_levels;  // T x n
  Matrix f_i1;      // T x r1
  Matrix f_i1c;     // T x r1, cumulated differenced-data factors
  Matrix f_i0;      // (T-1) x r0

  Index n_targets() const { return y_levels.cols(); }
  Matrix y_diffs() const { return diff_rows(y_levels); }

  void validate() const {
    if (static_cast<std::size_t>(y_levels.cols()) != targets.size())
      throw ContractError("ModelInputs: target names do not match the level columns");
    if (f_i1.cols() > 0 && f_i1.rows() != y_levels.rows())
      throw ContractError("ModelInputs: I(1) factors are not aligned with the targets");
    if (f_i1c.cols() > 0 && f_i1c.rows() != y_levels.rows())
      throw ContractError("ModelInputs: cumulated factors are not aligned with the targets");
    if (f_i0.cols() > 0 && f_i0.rows() != y_levels.rows() - 1)
      throw ContractError("ModelInputs: stationary factors are not aligned with the differenced targets");
  }
};

/// A fitted member of the model suite. Which members are populated depends
/// on the kind:
///   AR, FAR        -> univariate (one per target); FAR adds factor_dynamics
///   VAR, FAVAR     -> system on [dy] or [dy; f_i0]
///   ECM, FECM(c)   -> vecm on [y] or [y; f]; factor_dynamics when f_i0 enters
struct FittedModel {
  ModelKind kind = ModelKind::AR;
  Index n_targets = 0;
  std::vector<VarModel> univariate;
  std::optional<VarModel> system;
  std::optional<VecmModel> vecm;
  std::optional<VarModel> factor_dynamics;  // VAR(1) on the active f_i0 columns
  Index exog_lags = 0;                      // f_i0 lags in FECM equations
  std::vector<Index> factor_columns;        // f_i0 columns used; all-zero ones are dropped

  /// Lagged-difference terms per target (univariate) or for the system.
  std::vector<Index> lag_counts() const {
    std::vector<Index> out;
    if (!univariate.empty())
      for (const auto& m : univariate) out.push_back(m.lags);
    else if (system) out.push_back(system->lags);
    else if (vecm) out.push_back(vecm->lags - 1);
    return out;
  }
  std::optional<Index> rank() const {
    if (vecm) return vecm->rank;
    return std::nullopt;
  }
};

/// Columns of f that are not identically zero.
inline std::vector<Index> nonzero_columns(const Matrix& f) {
  std::vector<Index> out;
  for (Index j = 0; j < f.cols(); ++j)
    if ((f.col(j).array() != 0.0).any()) out.push_back(j);
  return out;
}

inline Matrix take_columns(const Matrix& f, const std::vector<Index>& cols) {
  Matrix out(f.rows(), static_cast<Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) out.col(static_cast<Index>(k)) = f.col(cols[k]);
  return out;
}

/// Lag count of the stationary-factor regressors in FECM equations.
inline Index fecm_exog_lags(Index p) { return std::max<Index>(1, p - 1); }

/// Stationary factors placed on the level row index (row 0 unused).
inline ExogenousBlock level_aligned_exog(const Matrix& f_i0, Index lags) {
  ExogenousBlock b;
  if (f_i0.cols() == 0) return b;
  b.values = Matrix::Zero(f_i0.rows() + 1, f_i0.cols());
  b.values.bottomRows(f_i0.rows()) = f_i0;
  b.lags = lags;
  b.first_valid = 1;
  return b;
}

/// Factor VAR(1) used to propagate stationary factors during iterated
/// forecasting.
inline VarModel fit_factor_dynamics(const Matrix& f_i0) { return fit_var_fixed(f_i0, 1); }

inline std::vector<VarModel> fit_univariate(const Matrix& dy, const ModelSpec& spec, const Matrix* exog) {
  std::vector<VarModel> out;
  for (Index j = 0; j < dy.cols(); ++j) out.push_back(fit_ar(dy.col(j), spec, exog));
  return out;
}

/// AR on dy for each target, augmented with lags of the stationary factors,
/// plus the factor VAR(1). `f0` holds the active factor columns; with none
/// left this is the plain AR.
inline FittedModel fit_far(const ModelInputs& in, const Matrix& f0, const ModelSpec& spec) {
  FittedModel fm;
  fm.kind = ModelKind::FAR;
  fm.n_targets = in.n_targets();
  fm.univariate = fit_univariate(in.y_diffs(), spec, f0.cols() > 0 ? &f0 : nullptr);
  if (f0.cols() > 0) fm.factor_dynamics = fit_factor_dynamics(f0);
  return fm;
}

/// VAR on [dy; f0].
inline FittedModel fit_favar(const ModelInputs& in, const Matrix& f0, const ModelSpec& spec) {
  const Matrix dy = in.y_diffs();
  Matrix joint(dy.rows(), dy.cols() + f0.cols());
  joint << dy, f0;
  FittedModel fm;
  fm.kind = ModelKind::FAVAR;
  fm.n_targets = in.n_targets();
  fm.system = fit_var(joint, spec);
  return fm;
}

/// Cointegrating rank of a level system by the ModelSpec's method (or its fixed
/// rank). The trace test uses level-VAR order `p`; the information criterion
/// is lag-free.
inline Index select_rank(const Matrix& levels, Index p, const ModelSpec& spec, const ExogenousBlock* exog) {
  if (spec.fixed_rank) return *spec.fixed_rank;
  if (spec.rank_method == RankMethod::ChengPhillipsBIC) return cheng_phillips_rank(levels).rank;
  return johansen_trace_rank(levels, p, Deterministic::UnrestrictedConstant, exog).rank;
}

/// VECM on the stacked levels [y; f] with f_i0 as lagged stationary
/// regressors. With no I(1) factors and no stationary factors this is the
/// plain ECM on y.
inline FittedModel fit_fecm_with(const Matrix& y_levels, const Matrix& f_level, const Matrix& f_i0, const ModelSpec& spec,
                                 ModelKind kind) {
  if (f_level.cols() > 0 && f_level.rows() != y_levels.rows())
    throw ContractError("fit_fecm: factor and target samples are misaligned");
  if (f_i0.cols() > 0 && f_i0.rows() != y_levels.rows() - 1)
    throw ContractError("fit_fecm: stationary factors are misaligned with the targets");
  Matrix z(y_levels.rows(), y_levels.cols() + f_level.cols());
  z << y_levels, f_level;

  FittedModel fm;
  fm.kind = kind;
  fm.n_targets = y_levels.cols();
  const Index p = spec.fixed_lags ? *spec.fixed_lags + 1 : select_lags(z, spec.max_lag, spec.lag_criterion).lags;
  ExogenousBlock exog;
  if (f_i0.cols() > 0) {
    fm.exog_lags = fecm_exog_lags(p);
    exog = level_aligned_exog(f_i0, fm.exog_lags);
    fm.factor_dynamics = fit_factor_dynamics(f_i0);
  }
  const ExogenousBlock* ex = exog.empty() ? nullptr : &exog;
  fm.vecm = fit_vecm(z, select_rank(z, p, spec, ex), p, Deterministic::UnrestrictedConstant, ex);
  return fm;
}

/// Fits one member of the suite on an estimation sample.
inline FittedModel fit_model(const ModelSpec& spec, const ModelInputs& in) {
  in.validate();
  if (uses_stationary_factors(spec.kind) && in.f_i0.cols() == 0 &&
      (spec.kind == ModelKind::FAR || spec.kind == ModelKind::FAVAR))
    throw ContractError(std::string(to_string(spec.kind)) + ": stationary factors required");
  const std::vector<Index> active = uses_stationary_factors(spec.kind) ? nonzero_columns(in.f_i0) : std::vector<Index>{};
  const Matrix f0 = take_columns(in.f_i0, active);
  FittedModel fm;
  switch (spec.kind) {
    case ModelKind::AR:
      fm.kind = ModelKind::AR;
      fm.n_targets = in.n_targets();
      fm.univariate = fit_univariate(in.y_diffs(), spec, nullptr);
      break;
    case ModelKind::FAR: fm = fit_far(in, f0, spec); break;
    case ModelKind::VAR:
      fm.kind = ModelKind::VAR;
      fm.n_targets = in.n_targets();
      fm.system = fit_var(in.y_diffs(), spec);
      break;
    case ModelKind::FAVAR: fm = fit_favar(in, f0, spec); break;
    case ModelKind::ECM:
      fm = fit_fecm_with(in.y_levels, Matrix(in.y_levels.rows(), 0), Matrix(in.y_levels.rows() - 1, 0), spec, ModelKind::ECM);
      break;
    case ModelKind::FECM:
      if (in.f_i1.cols() == 0) throw ContractError("FECM: I(1) factors required");
      fm = fit_fecm_with(in.y_levels, in.f_i1, f0, spec, ModelKind::FECM);
      break;
    case ModelKind::FECMc:
      if (in.f_i1c.cols() == 0) throw ContractError("FECMc: cumulated factors required");
      fm = fit_fecm_with(in.y_levels, in.f_i1c, f0, spec, ModelKind::FECMc);
      break;
  }
  fm.factor_columns = active;
  return fm;
}

inline FittedModel fit_fecm(const ModelInputs& in, ModelSpec spec) {
  spec.kind = ModelKind::FECM;
  return fit_model(spec, in);
}

/// Iterated forecasts of the target differences for steps 1..h (h x n).
inline Matrix forecast_model(const FittedModel& fm, const ModelInputs& in, Index h) {
  in.validate();
  if (h < 1) throw ContractError("forecast_model: horizon must be positive");
  const Matrix dy = in.y_diffs();
  const Matrix f0 = take_columns(in.f_i0, fm.factor_columns);
  Matrix factor_path;
  if (fm.factor_dynamics) factor_path = forecast_var(*fm.factor_dynamics, f0, h);

  Matrix out(h, fm.n_targets);
  switch (fm.kind) {
    case ModelKind::AR:
    case ModelKind::FAR:
      for (Index j = 0; j < fm.n_targets; ++j) {
        const VarModel& m = fm.univariate[static_cast<std::size_t>(j)];
        const Matrix hist = dy.col(j);
        out.col(j) = m.exog_lags() == 0 ? forecast_var(m, hist, h) : forecast_var(m, hist, h, &f0, &factor_path);
      }
      return out;
    case ModelKind::VAR:
      return forecast_var(*fm.system, dy, h);
    case ModelKind::FAVAR: {
      Matrix joint(dy.rows(), dy.cols() + f0.cols());
      joint << dy, f0;
      return forecast_var(*fm.system, joint, h).leftCols(fm.n_targets);
    }
    case ModelKind::ECM:
    case ModelKind::FECM:
    case ModelKind::FECMc: {
      const Matrix& f = fm.kind == ModelKind::FECM ? in.f_i1 : in.f_i1c;
      const Index nf = fm.kind == ModelKind::ECM ? 0 : f.cols();
      Matrix z(in.y_levels.rows(), fm.n_targets + nf);
      z.leftCols(fm.n_targets) = in.y_levels;
      if (nf > 0) z.rightCols(nf) = f;
      if (fm.exog_lags > 0) {
        const ExogenousBlock exog = level_aligned_exog(f0, fm.exog_lags);
        return forecast_vecm(*fm.vecm, z, h, &exog.values, &factor_path).leftCols(fm.n_targets);
      }
      return forecast_vecm(*fm.vecm, z, h).leftCols(fm.n_targets);
    }
  }
  throw ContractError("forecast_model: unknown kind");
}

}  // namespace fecm
