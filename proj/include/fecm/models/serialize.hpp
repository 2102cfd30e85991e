#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "fecm/error.hpp"
#include "fecm/models/suite.hpp"

// JSON schema "fecm.fitted_model/1":
//   matrix  {"rows": r, "cols": c, "data": [row-major values]}
//   var     {"dim", "lags", "nobs", "mu": [..], "A": [matrix], "B": [matrix], "Sigma": matrix}
//   vecm    {"dim", "rank", "lags", "nobs", "deterministic": "none"|"unrestricted_constant",
//            "mu", "alpha", "beta", "Phi": [matrix], "exog_coeffs": [matrix], "Sigma", "eigenvalues"}
//   model   {"schema", "kind", "n_targets", "lag_counts", "rank" (null unless error correction),
//            "exog_lags", "factor_columns", "univariate": [var], "system": var|null,
//            "vecm": vecm|null, "factor_dynamics": var|null}
// "lags" in vecm is the order p of the implied level VAR; lag_counts reports p - 1.
namespace fecm {

using json = nlohmann::json;

inline constexpr const char* kFittedModelSchema = "fecm.fitted_model/1";

inline json matrix_to_json(const Matrix& m) {
  json data = json::array();
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) data.push_back(m(i, j));
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

inline Matrix matrix_from_json(const json& j) {
  const Index rows = j.at("rows").get<Index>();
  const Index cols = j.at("cols").get<Index>();
  const auto& data = j.at("data");
  if (static_cast<Index>(data.size()) != rows * cols) throw ConfigError("matrix JSON: data length does not match rows x cols");
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index c = 0; c < cols; ++c) m(i, c) = data[static_cast<std::size_t>(i * cols + c)].get<double>();
  return m;
}

inline json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

inline Vector vector_from_json(const json& j) {
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Index>(i)) = j[i].get<double>();
  return v;
}

inline json matrices_to_json(const std::vector<Matrix>& ms) {
  json out = json::array();
  for (const auto& m : ms) out.push_back(matrix_to_json(m));
  return out;
}

inline std::vector<Matrix> matrices_from_json(const json& j) {
  std::vector<Matrix> out;
  for (const auto& m : j) out.push_back(matrix_from_json(m));
  return out;
}

inline json to_json(const VarModel& m) {
  return json{{"dim", m.dim()}, {"lags", m.lags}, {"nobs", m.nobs}, {"mu", vector_to_json(m.mu)},
              {"A", matrices_to_json(m.A)}, {"B", matrices_to_json(m.B)}, {"Sigma", matrix_to_json(m.Sigma)}};
}

inline VarModel var_from_json(const json& j) {
  VarModel m;
  m.lags = j.at("lags").get<Index>();
  m.nobs = j.at("nobs").get<Index>();
  m.mu = vector_from_json(j.at("mu"));
  m.A = matrices_from_json(j.at("A"));
  m.B = matrices_from_json(j.at("B"));
  m.Sigma = matrix_from_json(j.at("Sigma"));
  return m;
}

inline json to_json(const VecmModel& m) {
  return json{{"dim", m.dim()},
              {"rank", m.rank},
              {"lags", m.lags},
              {"nobs", m.nobs},
              {"deterministic", m.det == Deterministic::None ? "none" : "unrestricted_constant"},
              {"mu", vector_to_json(m.mu)},
              {"alpha", matrix_to_json(m.alpha)},
              {"beta", matrix_to_json(m.beta)},
              {"Phi", matrices_to_json(m.Phi)},
              {"exog_coeffs", matrices_to_json(m.exog_coeffs)},
              {"Sigma", matrix_to_json(m.Sigma)},
              {"eigenvalues", vector_to_json(m.eigenvalues)}};
}

inline VecmModel vecm_from_json(const json& j) {
  VecmModel m;
  m.rank = j.at("rank").get<Index>();
  m.lags = j.at("lags").get<Index>();
  m.nobs = j.at("nobs").get<Index>();
  const auto det = j.at("deterministic").get<std::string>();
  if (det == "none") m.det = Deterministic::None;
  else if (det == "unrestricted_constant") m.det = Deterministic::UnrestrictedConstant;
  else throw ConfigError("VECM JSON: unknown deterministic case '" + det + "'");
  m.mu = vector_from_json(j.at("mu"));
  m.alpha = matrix_from_json(j.at("alpha"));
  m.beta = matrix_from_json(j.at("beta"));
  m.Phi = matrices_from_json(j.at("Phi"));
  m.exog_coeffs = matrices_from_json(j.at("exog_coeffs"));
  m.Sigma = matrix_from_json(j.at("Sigma"));
  m.eigenvalues = vector_from_json(j.at("eigenvalues"));
  return m;
}

inline json to_json(const FittedModel& fm) {
  json uni = json::array();
  for (const auto& m : fm.univariate) uni.push_back(to_json(m));
  const auto rank = fm.rank();
  return json{{"schema", kFittedModelSchema},
              {"kind", std::string(to_string(fm.kind))},
              {"n_targets", fm.n_targets},
              {"lag_counts", fm.lag_counts()},
              {"rank", rank ? json(*rank) : json(nullptr)},
              {"exog_lags", fm.exog_lags},
              {"factor_columns", fm.factor_columns},
              {"univariate", std::move(uni)},
              {"system", fm.system ? to_json(*fm.system) : json(nullptr)},
              {"vecm", fm.vecm ? to_json(*fm.vecm) : json(nullptr)},
              {"factor_dynamics", fm.factor_dynamics ? to_json(*fm.factor_dynamics) : json(nullptr)}};
}

inline FittedModel fitted_model_from_json(const json& j) {
  if (j.value("schema", "") != kFittedModelSchema) throw ConfigError("fitted model JSON: unsupported schema");
  FittedModel fm;
  fm.kind = model_kind_from_string(j.at("kind").get<std::string>());
  fm.n_targets = j.at("n_targets").get<Index>();
  fm.exog_lags = j.at("exog_lags").get<Index>();
  fm.factor_columns = j.at("factor_columns").get<std::vector<Index>>();
  for (const auto& m : j.at("univariate")) fm.univariate.push_back(var_from_json(m));
  if (!j.at("system").is_null()) fm.system = var_from_json(j.at("system"));
  if (!j.at("vecm").is_null()) fm.vecm = vecm_from_json(j.at("vecm"));
  if (!j.at("factor_dynamics").is_null()) fm.factor_dynamics = var_from_json(j.at("factor_dynamics"));
  return fm;
}

}  // namespace fecm
