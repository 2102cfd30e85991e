#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "fecm/report/eval_report.hpp"

namespace fecm::testing {

// Published one-step relative MSE table, used as the report fixture.
inline EvalReport golden_table_fixture() {
  EvalReport rep;
  rep.targets = {"PPI", "CPI", "MMIR"};
  rep.horizons = {1};
  rep.models = {"AR", "FAR", "VAR", "FAVAR", "ECM", "FECM", "FECMc"};
  const std::vector<std::string> cols = {"FAR", "VAR", "FAVAR", "ECM", "FECM", "FECMc"};
  const double rmse_ar[3] = {0.93, 0.75, 1.26};
  const double ratios[3][6] = {{1.21, 1.01, 1.41, 1.04, 1.09, 0.98},
                               {0.97, 0.95, 1.00, 0.98, 0.82, 0.87},
                               {1.16, 1.26, 1.52, 1.16, 1.33, 1.24}};
  for (int i = 0; i < 3; ++i) {
    ReportCell c;
    c.n_errors = 28;
    c.rmse_ar = rmse_ar[i];
    c.mse_ratio["AR"] = 1.0;
    c.rmse_ratio["AR"] = 1.0;
    for (int k = 0; k < 6; ++k) {
      c.mse_ratio[cols[static_cast<std::size_t>(k)]] = ratios[i][k];
      c.rmse_ratio[cols[static_cast<std::size_t>(k)]] = std::sqrt(ratios[i][k]);
    }
    rep.cells[{rep.targets[static_cast<std::size_t>(i)], 1}] = c;
  }
  rep.rank_summary[1]["ECM"] = {2.00, 2.00, 2.00};
  rep.rank_summary[1]["FECM"] = {2.55, 2.00, 3.00};
  return rep;
}

}  // namespace fecm::testing
