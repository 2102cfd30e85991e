#pragma once

#include <cmath>
#include <span>

#include "fecm/error.hpp"

namespace fecm {

inline double mean_square(std::span<const double> errors) {
  if (errors.empty()) throw ContractError("forecast errors: empty input");
  double s = 0.0;
  for (double e : errors) s += e * e;
  return s / static_cast<double>(errors.size());
}

inline double compute_rmse(std::span<const double> errors) { return std::sqrt(mean_square(errors)); }

struct RelativeError {
  double mse_ratio = 0.0;
  double rmse_ratio = 0.0;
};

/// MSE and RMSE of `model` relative to `benchmark`; both vectors must hold
/// errors for the same origins in the same order.
inline RelativeError relative_mse(std::span<const double> model, std::span<const double> benchmark) {
  if (model.size() != benchmark.size()) throw ContractError("relative_mse: error vectors differ in length");
  const double denom = mean_square(benchmark);
  if (!(denom > 0.0)) throw NumericError("relative_mse: benchmark MSE is zero");
  const double ratio = mean_square(model) / denom;
  return {ratio, std::sqrt(ratio)};
}

}  // namespace fecm
