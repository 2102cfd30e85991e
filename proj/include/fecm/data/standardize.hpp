#pragma once

#include <cmath>
#include <string>

#include "fecm/data/panel.hpp"
#include "fecm/error.hpp"
#include "fecm/linalg.hpp"

namespace fecm {

struct ColumnScaling {
  Vector mean;
  Vector sd;
};

/// Column means and sample standard deviations (divisor T - 1). `names` is
/// used only for the error message.
inline ColumnScaling column_scaling(const Matrix& x, const std::vector<SeriesMeta>* names = nullptr) {
  if (x.rows() < 2) throw ContractError("standardize: needs at least two rows");
  ColumnScaling s;
  s.mean = x.colwise().mean().transpose();
  s.sd.resize(x.cols());
  for (Index j = 0; j < x.cols(); ++j) {
    const double ss = (x.col(j).array() - s.mean(j)).square().sum();
    s.sd(j) = std::sqrt(ss / static_cast<double>(x.rows() - 1));
    if (!(s.sd(j) > 1e-14 * std::max(1.0, std::abs(s.mean(j))))) {
      std::string name = names && static_cast<std::size_t>(j) < names->size()
                             ? (*names)[static_cast<std::size_t>(j)].mnemonic
                             : "column " + std::to_string(j);
      throw NumericError("standardize: series '" + name + "' has zero variance");
    }
  }
  return s;
}

inline Matrix apply_scaling(const Matrix& x, const ColumnScaling& s) {
  return (x.rowwise() - s.mean.transpose()).array().rowwise() / s.sd.transpose().array();
}

inline Matrix undo_scaling(const Matrix& z, const ColumnScaling& s) {
  return (z.array().rowwise() * s.sd.transpose().array()).matrix().rowwise() + s.mean.transpose();
}

inline Matrix standardize_matrix(const Matrix& x) { return apply_scaling(x, column_scaling(x)); }

struct StandardizedPanel {
  Panel panel;
  ColumnScaling scaling;
};

/// Each column to sample mean 0 and sample standard deviation 1.
inline StandardizedPanel standardize(const Panel& panel) {
  StandardizedPanel out;
  out.scaling = column_scaling(panel.values, &panel.meta);
  out.panel = panel;
  out.panel.values = apply_scaling(panel.values, out.scaling);
  return out;
}

inline Panel destandardize(const Panel& standardized, const ColumnScaling& scaling) {
  Panel out = standardized;
  out.values = undo_scaling(standardized.values, scaling);
  return out;
}

}  // namespace fecm
