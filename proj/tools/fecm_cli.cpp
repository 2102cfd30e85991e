// Command-line front end. Settings come from built-in defaults, then the
// --config file, then flags; later sources win.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fecm/app/commands.hpp"

namespace {

struct Flags {
  std::string config, data, meta, out, seed, horizons, targets, models, r1, r0, criterion, rank_method, locale, jobs;
};

void apply_flags(fecm::app::RunConfig& c, const Flags& f) {
  auto set = [&](const char* key, const std::string& v) {
    if (!v.empty()) fecm::app::set_option(c, key, v);
  };
  set("data", f.data);
  set("meta", f.meta);
  set("out", f.out);
  set("seed", f.seed);
  set("horizons", f.horizons);
  set("targets", f.targets);
  set("models", f.models);
  set("r1", f.r1);
  set("r0", f.r0);
  set("criterion", f.criterion);
  set("rank_method", f.rank_method);
  set("locale", f.locale);
  set("jobs", f.jobs);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Factor error-correction forecasting toolkit"};
  app.require_subcommand(1);
  Flags f;
  app.add_option("--config", f.config, "Configuration file (key = value lines)");
  app.add_option("--data", f.data, "Panel data file (date column plus one column per series)");
  app.add_option("--meta", f.meta, "Series metadata file");
  app.add_option("--out", f.out, "Output directory");
  app.add_option("--seed", f.seed, "Seed for simulated panels");
  app.add_option("--horizons", f.horizons, "Comma-separated forecast horizons, ascending");
  app.add_option("--targets", f.targets, "Comma-separated target mnemonics");
  app.add_option("--models", f.models, "Comma-separated model kinds (AR,FAR,VAR,FAVAR,ECM,FECM,FECMc)");
  app.add_option("--r1", f.r1, "Number of I(1) factors, or 'ic'");
  app.add_option("--r0", f.r0, "Number of stationary factors, or 'ic'");
  app.add_option("--criterion", f.criterion, "Lag criterion")->check(CLI::IsMember({"bic", "hq"}));
  app.add_option("--rank-method", f.rank_method, "Cointegration rank method")->check(CLI::IsMember({"johansen", "cp-bic"}));
  app.add_option("--locale", f.locale, "Decimal mark in tables")->check(CLI::IsMember({"point", "comma"}));
  app.add_option("--jobs", f.jobs, "Worker threads (default: all cores)");

  const char* names[] = {"transform", "factors", "fit", "forecast", "evaluate", "run", "simulate"};
  const char* help[] = {"Apply transformation codes and screen outliers",
                        "Extract I(1), stationary and cumulated factors",
                        "Fit every model on the full estimation sample",
                        "Recursive out-of-sample forecasts",
                        "Report from forecasts.csv and selection.csv in --out",
                        "Full experiment: transform, factors, fit, forecast, evaluate",
                        "Simulate a panel from a DGP config (--config) with known structure"};
  for (int i = 0; i < 7; ++i) app.add_subcommand(names[i], help[i])->fallthrough();

  CLI11_PARSE(app, argc, argv);
  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    if (cmd == "simulate") {
      fecm::sim::DgpConfig d;
      if (!f.config.empty()) d = fecm::sim::load_dgp_config(f.config);
      if (!f.seed.empty()) {
        fecm::app::RunConfig tmp;
        fecm::app::set_option(tmp, "seed", f.seed);
        d.seed = tmp.seed;
      }
      return fecm::app::cmd_simulate(d, f.out.empty() ? std::string("fecm_sim") : f.out, std::cerr);
    }
    fecm::app::RunConfig c;
    if (!f.config.empty()) fecm::app::load_run_config(f.config, c);
    apply_flags(c, f);
    c.validate();
    if (cmd == "transform") return fecm::app::cmd_transform(c, std::cerr);
    if (cmd == "factors") return fecm::app::cmd_factors(c, std::cerr);
    if (cmd == "fit") return fecm::app::cmd_fit(c, std::cerr);
    if (cmd == "forecast") return fecm::app::cmd_forecast(c, std::cerr);
    if (cmd == "evaluate") return fecm::app::cmd_evaluate(c, std::cerr);
    return fecm::app::cmd_run(c, std::cerr);
  } catch (const fecm::DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
