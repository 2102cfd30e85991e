#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fecm/error.hpp"
#include "fecm/linalg.hpp"

namespace fecm {

enum class ModelKind { AR, FAR, VAR, FAVAR, ECM, FECM, FECMc };

inline constexpr std::array<ModelKind, 7> kAllModelKinds = {ModelKind::AR,  ModelKind::FAR,  ModelKind::VAR,  ModelKind::FAVAR,
                                                           ModelKind::ECM, ModelKind::FECM, ModelKind::FECMc};

inline std::string_view to_string(ModelKind k) {
  switch (k) {
    case ModelKind::AR: return "AR";
    case ModelKind::FAR: return "FAR";
    case ModelKind::VAR: return "VAR";
    case ModelKind::FAVAR: return "FAVAR";
    case ModelKind::ECM: return "ECM";
    case ModelKind::FECM: return "FECM";
    case ModelKind::FECMc: return "FECMc";
  }
  return "?";
}

inline ModelKind model_kind_from_string(std::string_view s) {
  for (ModelKind k : kAllModelKinds)
    if (to_string(k) == s) return k;
  throw ConfigError("unknown model kind '" + std::string(s) + "'");
}

inline bool is_error_correction(ModelKind k) {
  return k == ModelKind::ECM || k == ModelKind::FECM || k == ModelKind::FECMc;
}

inline bool is_univariate(ModelKind k) { return k == ModelKind::AR || k == ModelKind::FAR; }

inline bool uses_stationary_factors(ModelKind k) {
  return k == ModelKind::FAR || k == ModelKind::FAVAR || k == ModelKind::FECM || k == ModelKind::FECMc;
}

enum class LagCriterion { BIC, HQ };
enum class RankMethod { JohansenTrace, ChengPhillipsBIC };

inline std::string_view to_string(LagCriterion c) { return c == LagCriterion::BIC ? "BIC" : "HQ"; }
inline std::string_view to_string(RankMethod m) {
  return m == RankMethod::JohansenTrace ? "JohansenTrace" : "ChengPhillipsBIC";
}

struct ModelSpec {
  ModelKind kind = ModelKind::AR;
  std::vector<std::string> variables;
  Index max_lag = 4;
  LagCriterion lag_criterion = LagCriterion::BIC;
  RankMethod rank_method = RankMethod::ChengPhillipsBIC;
  Index r1 = 1;
  Index r0 = 3;
  std::optional<Index> fixed_lags;  // skip lag selection
  std::optional<Index> fixed_rank;  // skip rank selection

  void validate() const {
    if (variables.empty()) throw ConfigError(std::string(to_string(kind)) + ": no target variables");
    if (max_lag < 1) throw ConfigError("max_lag must be at least 1");
    if ((kind == ModelKind::FAR || kind == ModelKind::FAVAR) && r0 < 1)
      throw ConfigError(std::string(to_string(kind)) + " requires at least one stationary factor (r0 >= 1)");
    if ((kind == ModelKind::FECM || kind == ModelKind::FECMc) && r1 < 1)
      throw ConfigError(std::string(to_string(kind)) + " requires at least one I(1) factor (r1 >= 1)");
  }
};

}  // namespace fecm
