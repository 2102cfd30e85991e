#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "fecm/factors/pca.hpp"

namespace fecm {

/// Criterion values for every candidate count 0..r_max.
struct CriterionTrace {
  std::vector<double> variance;   // V(r)
  std::vector<double> criterion;  // V(r) + penalty, or ln V(r) + penalty
  Index selected = 0;
};

namespace detail {

/// Residual sum of squares after r components, for r = 0..r_max, from the
/// singular values of x.
inline std::vector<double> residual_ss(const Matrix& x, Index r_max) {
  std::vector<double> out(static_cast<std::size_t>(r_max + 1));
  const double total = x.squaredNorm();
  Vector s = r_max > 0 ? Vector(thin_svd(x).singularValues()) : Vector(0);
  double explained = 0.0;
  for (Index r = 0; r <= r_max; ++r) {
    if (r > 0) explained += s(r - 1) * s(r - 1);
    out[static_cast<std::size_t>(r)] = std::max(0.0, total - explained);
  }
  return out;
}

inline Index argmin_first(const std::vector<double>& v) {
  Index best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] < v[static_cast<std::size_t>(best)]) best = static_cast<Index>(i);
  return best;
}

}  // namespace detail

/// Number of I(1) factors from a centered level panel using the panel
/// information criterion for non-stationary factors:
///   IPC(r) = V(r) + r * s2 * a_T * (N + T) / (N T) * ln(min(N, T)),
/// with V(r) = SSR(r) / (N T^2), s2 = V(r_max) and a_T = T / (4 ln ln T).
inline CriterionTrace select_num_i1_factors(const Matrix& centered_levels, Index r_max) {
  const Index t = centered_levels.rows();
  const Index n = centered_levels.cols();
  if (r_max < 0 || r_max > std::min(t, n)) throw ContractError("select_num_i1_factors: r_max out of range");
  CriterionTrace trace;
  const auto ssr = detail::residual_ss(centered_levels, r_max);
  const double td = static_cast<double>(t);
  const double nd = static_cast<double>(n);
  for (double v : ssr) trace.variance.push_back(v / (nd * td * td));
  const double s2 = trace.variance.back();
  const double alpha_t = td / (4.0 * std::log(std::log(td)));
  const double penalty = s2 * alpha_t * (nd + td) / (nd * td) * std::log(std::min(nd, td));
  for (Index r = 0; r <= r_max; ++r)
    trace.criterion.push_back(trace.variance[static_cast<std::size_t>(r)] + static_cast<double>(r) * penalty);
  trace.selected = detail::argmin_first(trace.criterion);
  return trace;
}

/// Number of stationary factors by the ICp2 criterion
///   ln V(r) + r (N + T) / (N T) ln(min(N, T)),  V(r) = SSR(r) / (N T).
/// V(r) is floored at 1e-14 V(0) so an exact low-rank panel ties at its rank
/// and the smallest count wins.
inline CriterionTrace select_num_i0_factors(const Matrix& standardized_diffs, Index r_max) {
  const Index t = standardized_diffs.rows();
  const Index n = standardized_diffs.cols();
  if (r_max < 0 || r_max > std::min(t, n)) throw ContractError("select_num_i0_factors: r_max out of range");
  CriterionTrace trace;
  const auto ssr = detail::residual_ss(standardized_diffs, r_max);
  const double td = static_cast<double>(t);
  const double nd = static_cast<double>(n);
  for (double v : ssr) trace.variance.push_back(v / (nd * td));
  if (!(trace.variance[0] > 0.0)) {
    trace.criterion.assign(trace.variance.size(), 0.0);
    return trace;
  }
  const double floor = 1e-14 * trace.variance[0];
  const double penalty = (nd + td) / (nd * td) * std::log(std::min(nd, td));
  for (Index r = 0; r <= r_max; ++r)
    trace.criterion.push_back(std::log(std::max(trace.variance[static_cast<std::size_t>(r)], floor)) +
                              static_cast<double>(r) * penalty);
  trace.selected = detail::argmin_first(trace.criterion);
  return trace;
}

}  // namespace fecm
