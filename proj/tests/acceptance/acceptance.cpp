// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Thresholds are fixed; do not tune them to the results.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "fecm/app/commands.hpp"
#include "fecm/data/outliers.hpp"
#include "fecm/data/transform.hpp"
#include "fecm/factors/factor_set.hpp"
#include "fecm/factors/pca.hpp"
#include "fecm/forecast/oos.hpp"
#include "fecm/models/var.hpp"
#include "fecm/models/vecm.hpp"
#include "fecm/random.hpp"
#include "fecm/report/eval_report.hpp"
#include "fecm/sim/dgp.hpp"
#include "support/oracles.hpp"
#include "support/table_fixture.hpp"

using namespace fecm;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Clock {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> kTargets = {"PPI", "CPI", "MMIR"};

Matrix random_walks(Rng& rng, Index t_len, Index k, double drift) {
  Matrix y(t_len, k);
  for (Index j = 0; j < k; ++j) {
    double v = 0;
    for (Index t = 0; t < t_len; ++t) y(t, j) = (v += drift + rng.normal());
  }
  return y;
}

// y1 random walk with drift, y2 = y1 + u, u AR(1) with coefficient 0.5.
Matrix cointegrated_pair(Rng& rng, Index t_len, double drift) {
  Matrix y(t_len, 2);
  double w = 0, u = 0;
  for (Index t = 0; t < t_len; ++t) {
    w += drift + rng.normal();
    u = 0.5 * u + rng.normal();
    y(t, 0) = w;
    y(t, 1) = w + u;
  }
  return y;
}

// ---- 1 ----
Outcome transform_round_trip() {
  Clock clock;
  Rng rng(1001);
  double worst = 0;
  int cases = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    const std::size_t n = 3 + static_cast<std::size_t>(rng.uniform() * 200);
    std::vector<double> y(n);
    double level = 1.0 + 99.0 * rng.uniform();
    for (auto& v : y) v = (level *= std::exp(0.05 * rng.normal()));
    for (int tc = 1; tc <= 6; ++tc) {
      const auto fwd = apply_transformation(y, transform_code_from_int(tc));
      const auto back = invert_transformation(fwd.record.original_first_values, fwd.values, fwd.record);
      const std::size_t k = fwd.record.original_first_values.size();
      if (back.size() + k != n) return {false, "length mismatch for code " + std::to_string(tc)};
      for (std::size_t i = 0; i < back.size(); ++i) worst = std::max(worst, std::abs(back[i] - y[i + k]) / std::abs(y[i + k]));
      ++cases;
    }
  }
  const double secs = clock.seconds();
  return {worst <= 1e-10 && secs < 5.0, std::to_string(cases) + " series x code pairs, max relative error " +
                                             fmt("%.2e", worst) + ", " + fmt("%.2f", secs) + " s (limits 1e-10, 5 s)"};
}

// ---- 2 ----
Outcome outlier_rule() {
  struct Fixture {
    std::vector<double> y;
    std::vector<std::size_t> flagged;
    std::vector<double> replaced;
  };
  std::vector<Fixture> fx;
  {
    // Nineteen ones and a spike: IQR 0, spike replaced by the median of five predecessors.
    std::vector<double> y(20, 1.0);
    y[5] = 1000.0;
    fx.push_back({y, {5}, {1.0}});
  }
  // Median 2.5, IQR 1, bound 6: first value replaced by the median of the rest.
  fx.push_back({{10, 2, 3, 2, 3, 2, 3, 2, 3, 2, 3, 2}, {0}, {2.0}});
  // Index 3 has only three predecessors: median(2, 3, 2).
  fx.push_back({{2, 3, 2, 40, 3, 2, 3, 2, 3, 2, 3, 2}, {3}, {2.0}});
  // Index 1 has a single predecessor.
  fx.push_back({{3, 50, 2, 3, 2, 3, 2, 3, 2, 3, 2, 3}, {1}, {3.0}});
  {
    // Adjacent spikes: the second uses the cleaned first. Median 4.5, IQR 5.
    std::vector<double> y;
    for (int k = 0; k < 2; ++k)
      for (int i = 0; i < 10; ++i) y.push_back(i);
    y[12] = 500;
    y[13] = -500;
    fx.push_back({y, {12, 13}, {7.0, 7.0}});
  }
  int exact = 0;
  for (const auto& f : fx) {
    const auto r = replace_outliers(f.y);
    bool ok = r.outlier_indices == f.flagged;
    for (std::size_t k = 0; ok && k < f.flagged.size(); ++k) ok = r.cleaned[f.flagged[k]] == f.replaced[k];
    for (std::size_t i = 0; ok && i < f.y.size(); ++i)
      if (std::find(f.flagged.begin(), f.flagged.end(), i) == f.flagged.end()) ok = r.cleaned[i] == f.y[i];
    exact += ok;
  }
  // Idempotence is required on the fixture suite: the hand fixtures plus
  // isolated spikes on Gaussian noise. Several spikes in one short series can
  // mask a smaller one (cleaning shrinks the IQR), so a second pass may flag
  // it; that stress set is reported but not gated.
  auto idempotent_on = [](const std::vector<std::vector<double>>& set) {
    int ok = 0;
    for (const auto& y : set) {
      const auto once = replace_outliers(y);
      const auto twice = replace_outliers(once.cleaned);
      ok += twice.cleaned == once.cleaned && twice.outlier_indices.empty();
    }
    return ok;
  };
  Rng rng(1002);
  std::vector<std::vector<double>> suite, stress;
  for (const auto& f : fx) suite.push_back(f.y);
  for (int k = 0; k < 100; ++k) {
    std::vector<double> y(20 + k % 80);
    for (auto& v : y) v = rng.normal();
    y[static_cast<std::size_t>(rng.uniform() * static_cast<double>(y.size()))] += (k % 2 ? 40.0 : -40.0);
    suite.push_back(y);
  }
  for (int k = 0; k < 200; ++k) {
    std::vector<double> y(12 + k % 90);
    for (auto& v : y) v = rng.normal();
    for (int s = 0; s < 1 + k % 4; ++s) y[static_cast<std::size_t>(rng.uniform() * static_cast<double>(y.size()))] += 30.0 * rng.normal();
    stress.push_back(y);
  }
  const int idem = idempotent_on(suite);
  const int idem_stress = idempotent_on(stress);
  return {exact == static_cast<int>(fx.size()) && idem == static_cast<int>(suite.size()),
          std::to_string(exact) + "/" + std::to_string(fx.size()) + " hand fixtures exact, idempotent on " +
              std::to_string(idem) + "/" + std::to_string(suite.size()) + " fixture series (multi-spike stress, not gated: " +
              std::to_string(idem_stress) + "/" + std::to_string(stress.size()) + ")"};
}

// ---- 3 ----
Outcome pca_oracle() {
  double worst = 0;
  for (int rep = 0; rep < 50; ++rep) {
    Rng rng(replication_seed(1003, static_cast<std::uint64_t>(rep)));
    const Index n = 2 + rep % 7;
    const Index t = 10 + (rep * 13) % 41;
    const Matrix x = rng.normal_matrix(t, n) + rng.normal_matrix(t, 1) * rng.normal_matrix(1, n);
    const Index r = 1 + rep % std::min<Index>(n, 3);
    for (double c : {static_cast<double>(t), static_cast<double>(t * t)}) {
      const PcaResult got = principal_components(x, r, c);
      Matrix f, l;
      Vector ev;
      testing::oracle_pca(x, r, c, f, l, ev);
      worst = std::max({worst, (got.factors - f).cwiseAbs().maxCoeff(), (got.loadings - l).cwiseAbs().maxCoeff(),
                        (got.eigenvalues - ev.head(got.eigenvalues.size())).cwiseAbs().maxCoeff()});
    }
  }
  return {worst <= 1e-8, "50 panels (N <= 8, T <= 50), max abs difference " + fmt("%.2e", worst) + " (limit 1e-8)"};
}

// ---- 4 and 5 share the replications ----
struct FactorMc {
  int recovered = 0;
  int r0_right = 0;
  int r1_right = 0;
  std::map<Index, int> r0_counts;
  double min_cc = 1.0;
  double seconds = 0;
};

FactorMc factor_monte_carlo() {
  Clock clock;
  FactorMc mc;
  for (int rep = 0; rep < 100; ++rep) {
    sim::DgpConfig cfg;
    cfg.seed = replication_seed(1004, static_cast<std::uint64_t>(rep));
    const auto s = sim::generate_panel(cfg);
    const PreparedSample sample = prepare_sample(s.panel);
    FactorOptions fixed;
    fixed.r1 = 1;
    fixed.r0 = 3;
    const FactorSet fs = estimate_factor_set(sample, fixed);
    // Detrended estimates identify the factor net of a constant and trend.
    const Matrix& truth = s.truth.f_i1;
    const double cc = canonical_correlations(fit_level_deterministics(truth, true).remove(truth),
                                             fit_level_deterministics(fs.f_i1, true).remove(fs.f_i1))(0);
    mc.recovered += cc > 0.95;
    mc.min_cc = std::min(mc.min_cc, cc);
    const FactorSet ic = estimate_factor_set(sample, FactorOptions{});
    mc.r0_right += ic.r0 == 3;
    ++mc.r0_counts[ic.r0];
    mc.r1_right += ic.r1 == 1;
  }
  mc.seconds = clock.seconds();
  return mc;
}

// ---- 6 ----
Outcome rank_selection() {
  constexpr double kDrift = 0.5;
  int cp_one = 0;
  for (int rep = 0; rep < 200; ++rep) {
    Rng rng(replication_seed(1006, static_cast<std::uint64_t>(rep)));
    cp_one += cheng_phillips_rank(cointegrated_pair(rng, 200, kDrift)).rank == 1;
  }
  int reject = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    Rng rng(replication_seed(1007, static_cast<std::uint64_t>(rep)));
    reject += johansen_trace_rank(random_walks(rng, 200, 2, kDrift), 1).rank > 0;
  }
  const double size = reject / 1000.0;
  return {cp_one >= 170 && size >= 0.02 && size <= 0.09,
          "Cheng-Phillips rank 1 in " + std::to_string(cp_one) + "/200 (need 170), Johansen trace size " +
              fmt("%.1f%%", 100 * size) + " over 1000 (need 2%..9%)"};
}

// ---- 7 ----
Matrix level_var_forecast_diffs(const VarModel& m, const Matrix& levels, Index h) {
  const Matrix lv = forecast_var(m, levels, h);
  Matrix d(h, levels.cols());
  d.row(0) = lv.row(0) - levels.row(levels.rows() - 1);
  for (Index s = 1; s < h; ++s) d.row(s) = lv.row(s) - lv.row(s - 1);
  return d;
}

Outcome representation_equivalences() {
  double full = 0, zero = 0;
  for (int rep = 0; rep < 20; ++rep) {
    Rng rng(replication_seed(1008, static_cast<std::uint64_t>(rep)));
    const Index n = 2 + rep % 3;
    const Matrix walks = random_walks(rng, 150, n, 0.2);
    const Matrix y = walks + 0.3 * rng.normal_matrix(150, n);
    for (Index p : {1, 2, 3}) {
      const VecmModel v_full = fit_vecm(y, n, p);
      const VarModel lvar = fit_var_fixed(y, p);
      const VecmModel v_zero = fit_vecm(walks, 0, p);
      const VarModel dvar = fit_var_fixed(diff_rows(walks), p - 1);
      for (Index h : {1, 2, 4, 8}) {
        full = std::max(full, (forecast_vecm(v_full, y, h) - level_var_forecast_diffs(lvar, y, h)).cwiseAbs().maxCoeff());
        zero = std::max(zero, (forecast_vecm(v_zero, walks, h) - forecast_var(dvar, diff_rows(walks), h)).cwiseAbs().maxCoeff());
      }
    }
  }
  return {full <= 1e-8 && zero <= 1e-8, "full rank vs level VAR " + fmt("%.2e", full) + ", rank 0 vs difference VAR " +
                                            fmt("%.2e", zero) + " over h in {1,2,4,8}, p in {1,2,3} (limit 1e-8)"};
}

// ---- 8 ----
std::vector<ModelSpec> specs_for(const std::vector<ModelKind>& kinds) {
  std::vector<ModelSpec> out;
  for (ModelKind k : kinds) {
    ModelSpec s;
    s.kind = k;
    s.variables = kTargets;
    out.push_back(s);
  }
  return out;
}

const std::vector<ModelKind> kAll(kAllModelKinds.begin(), kAllModelKinds.end());

Outcome no_look_ahead() {
  sim::DgpConfig cfg;
  cfg.N = 30;
  cfg.T = 100;
  cfg.seed = 1009;
  const auto s = sim::generate_panel(cfg);
  OosOptions opt;
  opt.targets = kTargets;
  opt.factors.r1 = 1;
  opt.factors.r0 = 3;
  long compared = 0, differing = 0;
  for (Index refit : {1, 4}) {
    const OosPlan plan{0, 75, 99, refit};
    const OosResult base = run_recursive_oos(s.panel, specs_for(kAll), plan, opt);
    for (Index cut = 74; cut < 99; cut += 3) {
      Panel perturbed = s.panel;
      Rng rng(static_cast<std::uint64_t>(cut));
      for (Index t = cut + 1; t < perturbed.rows(); ++t)
        for (Index j = 0; j < perturbed.cols(); ++j) perturbed.values(t, j) += 10.0 * rng.normal();
      const OosResult again = run_recursive_oos(perturbed, specs_for(kAll), plan, opt);
      std::map<std::tuple<std::string, Quarter, Index, std::string>, const ForecastRow*> index;
      for (const auto& f : again.forecasts) index[{f.model, f.origin, f.horizon, f.target}] = &f;
      const Quarter at = s.panel.time_index[static_cast<std::size_t>(cut)];
      for (const auto& f : base.forecasts) {
        if (f.origin > at) continue;
        ++compared;
        const auto it = index.find({f.model, f.origin, f.horizon, f.target});
        if (it == index.end() || it->second->level != f.level || it->second->transformed != f.transformed) ++differing;
      }
    }
  }
  return {compared > 0 && differing == 0, std::to_string(compared) + " forecasts at or before the perturbed date, " +
                                              std::to_string(differing) + " changed (need exact equality)"};
}

// ---- 9 ----
Outcome qualitative_ordering() {
  Clock clock;
  std::map<std::pair<std::string, Index>, std::vector<double>> ratios;
  int failures = 0;
  for (int rep = 0; rep < 100; ++rep) {
    sim::DgpConfig cfg;
    cfg.N = 100;
    cfg.T = 200;
    cfg.coint_strength = 0.8;
    cfg.seed = replication_seed(1010, static_cast<std::uint64_t>(rep));
    const auto s = sim::generate_panel(cfg);
    OosOptions opt;
    opt.targets = kTargets;
    opt.horizons = {2, 4};
    opt.factors.r1 = 1;
    opt.factors.r0 = 3;
    const OosResult res = run_recursive_oos(s.panel, specs_for(kAll), OosPlan{0, 160, 199, 1}, opt);
    failures += static_cast<int>(res.failures.size());
    const EvalReport rep_ = build_report(res.forecasts, res.selections);
    for (Index h : {2, 4})
      for (const auto& t : kTargets)
        for (const auto& [model, r] : rep_.cell(t, h).mse_ratio) ratios[{model, h}].push_back(r);
  }
  auto med = [&](const std::string& m, Index h) { return stats::median(ratios[{m, h}]); };
  const double secs = clock.seconds();
  const bool pass = med("FECM", 2) < med("VAR", 2) && med("FECM", 4) < med("VAR", 4) && med("FECM", 4) < 1.0 && secs < 600;
  std::string detail = "median MSE/MSE_AR over 100 reps x 3 targets, h=2 / h=4:";
  for (const char* m : {"FECM", "FECMc", "VAR", "ECM", "FAVAR", "FAR"})
    detail += std::string(" ") + m + " " + fmt("%.3f", med(m, 2)) + "/" + fmt("%.3f", med(m, 4));
  detail += "; " + std::to_string(failures) + " failed fits; " + fmt("%.0f", secs) + " s (limit 600)";
  return {pass, detail};
}

// ---- 10 ----
Outcome report_golden(const fs::path& src) {
  const std::string golden = read_file(src / "tests/golden/table_h1.txt");
  const bool table_ok = !golden.empty() && render_tables(testing::golden_table_fixture(), 1) == golden;
  // Figure data from a full report: 3 targets x 4 horizons x 6 compared models.
  std::vector<ForecastRow> rows;
  Rng rng(1011);
  for (ModelKind k : kAll)
    for (int o = 0; o < 10; ++o)
      for (Index h : kDefaultHorizons)
        for (const auto& t : kTargets) {
          ForecastRow r;
          r.model = to_string(k);
          r.target = t;
          r.origin = Quarter{2012, 1}.plus(o);
          r.horizon = h;
          r.realized = rng.normal();
          r.level = rng.normal();
          rows.push_back(r);
        }
  const EvalReport rep = build_report(rows, {});
  const FigureData fig = emit_figure_data(rep);
  const long data_rows = std::count(fig.csv.begin(), fig.csv.end(), '\n') - 1;
  const long expected = static_cast<long>(rep.targets.size() * rep.horizons.size() * rep.compared_models().size());
  return {table_ok && data_rows == expected && expected == 72,
          std::string("golden table ") + (table_ok ? "byte-identical" : "DIFFERS") + ", figure rows " +
              std::to_string(data_rows) + " = targets x horizons x compared models " + std::to_string(expected)};
}

// ---- 11 ----
Outcome end_to_end_determinism(const fs::path& src) {
  const fs::path root = fs::temp_directory_path() / "fecm_acceptance_run";
  fs::remove_all(root);
  std::map<std::string, std::string> hashes[2];
  for (int k = 0; k < 2; ++k) {
    app::RunConfig c;
    app::load_run_config((src / "data/synthetic_run.cfg").string(), c);
    c.dgp_config = (src / "data/synthetic_dgp.cfg").string();
    c.out = (root / std::to_string(k)).string();
    std::ostringstream log;
    app::cmd_run(c, log);
    for (const auto& e : fs::recursive_directory_iterator(c.out))
      if (e.is_regular_file()) hashes[k][fs::relative(e.path(), c.out).string()] = app::hex64(app::fnv1a(read_file(e.path())));
  }
  return {!hashes[0].empty() && hashes[0] == hashes[1],
          std::to_string(hashes[0].size()) + " files, trees " + (hashes[0] == hashes[1] ? "identical" : "DIFFER")};
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path src = argc > 1 ? fs::path(argv[1]) : fs::path(FECM_SOURCE_DIR);
  int failed = 0;
  auto report = [&](int id, const char* name, const std::function<Outcome()>& run) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
    std::fflush(stdout);
  };
  report(1, "transformation round trip", transform_round_trip);
  report(2, "outlier rule", outlier_rule);
  report(3, "principal components oracle", pca_oracle);
  FactorMc mc;
  bool mc_ok = true;
  std::string mc_error;
  try {
    mc = factor_monte_carlo();
  } catch (const std::exception& e) {
    mc_ok = false;
    mc_error = e.what();
  }
  report(4, "factor recovery", [&]() -> Outcome {
    if (!mc_ok) return {false, "exception: " + mc_error};
    return {mc.recovered >= 95 && mc.seconds < 60,
            "canonical correlation > 0.95 in " + std::to_string(mc.recovered) + "/100 (need 95), min " +
                fmt("%.4f", mc.min_cc) + ", " + fmt("%.1f", mc.seconds) + " s for both criteria (limit 60)"};
  });
  report(5, "factor count criteria", [&]() -> Outcome {
    if (!mc_ok) return {false, "exception: " + mc_error};
    std::string counts;
    for (const auto& [r, n] : mc.r0_counts) counts += " " + std::to_string(r) + "x" + std::to_string(n);
    return {mc.r0_right >= 90 && mc.r1_right >= 85, "stationary count 3 in " + std::to_string(mc.r0_right) +
                                                        "/100 (need 90), trend count 1 in " +
                                                        std::to_string(mc.r1_right) + "/100 (need 85); stationary counts selected:" + counts};
  });
  report(6, "cointegration rank selection", rank_selection);
  report(7, "error-correction representation equivalences", representation_equivalences);
  report(8, "no look-ahead", no_look_ahead);
  report(9, "error-correction models beat the unrestricted VAR", qualitative_ordering);
  report(10, "report golden files", [&] { return report_golden(src); });
  report(11, "end-to-end determinism", [&] { return end_to_end_determinism(src); });
  std::printf("%d of 11 criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
