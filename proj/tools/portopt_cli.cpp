// Command-line front end: analytic theory curves, Monte Carlo
// simulation, simulation-vs-theory comparison, and the invariant check
// suites. Machine-readable output goes to the requested files or
// stdout; logs go to stderr.

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "portopt/checks.hpp"
#include "portopt/csv.hpp"
#include "portopt/errors.hpp"
#include "portopt/harness.hpp"
#include "portopt/market.hpp"
#include "portopt/replica.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFail = 1;       // comparison / check did not pass
constexpr int kExitDomain = 2;     // violated precondition
constexpr int kExitExperiment = 3; // experiment-level failure
constexpr int kExitUsage = 64;     // bad command line
constexpr int kExitData = 65;      // corrupted input file
constexpr int kExitIo = 74;        // I/O failure

struct SweepSpec {
  double lo = 0.0, hi = 0.0, step = 0.0;
};

std::vector<double> expand_sweep(const SweepSpec& sweep) {
  std::vector<double> grid;
  if (!(sweep.step > 0.0)) return grid;
  for (double r = sweep.lo; r <= sweep.hi + 1e-12 * sweep.step; r += sweep.step) {
    grid.push_back(r);
  }
  return grid;
}

std::optional<SweepSpec> parse_sweep(const std::string& text) {
  SweepSpec sweep;
  char trailing = '\0';
  if (std::sscanf(text.c_str(), "%lf:%lf:%lf%c", &sweep.lo, &sweep.hi, &sweep.step,
                  &trailing) != 3) {
    return std::nullopt;
  }
  return sweep;
}

portopt::ReportFormat format_for(const std::string& name,
                                 const std::filesystem::path& out) {
  if (name == "csv") return portopt::ReportFormat::csv;
  if (name == "json") return portopt::ReportFormat::json;
  // auto: pick by extension
  return out.extension() == ".json" ? portopt::ReportFormat::json
                                    : portopt::ReportFormat::csv;
}

struct CommonFlags {
  std::string config_path;
  std::string out_path;
  std::string sweep_text;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  bool paper_scale = false;
  std::string stat = "stderr";
  std::string format = "auto";
  int threads = 0;
};

portopt::ExperimentConfig load_with_overrides(const CommonFlags& flags) {
  portopt::ExperimentConfig config = portopt::load_config(flags.config_path);
  if (flags.paper_scale) {
    config.total_assets = 1000;
    config.periods = 2000;
  }
  if (flags.seed) config.seed = *flags.seed;
  if (flags.trials) config.trials = *flags.trials;
  if (!flags.sweep_text.empty()) {
    const auto sweep = parse_sweep(flags.sweep_text);
    if (!sweep) throw portopt::ConfigError("bad --sweep, expected lo:hi:step");
    config.return_grid = expand_sweep(*sweep);
  }
  config.validate();
  return config;
}

int cmd_analytic(const CommonFlags& flags) {
  const portopt::ExperimentConfig config = load_with_overrides(flags);
  const portopt::AsymptoticMoments moments =
      portopt::true_moments(config.pareto_r, config.pareto_h);
  const double alpha = config.alpha();

  portopt::CsvTable table;
  table.columns = {"R",      "eps_theory", "sharpe_theory", "eps_min",       "eps0",
                   "rho_star", "cal_y",      "market_return", "market_sigma", "cal_slope"};
  for (double target : config.return_grid) {
    const portopt::ConstraintSpec c{config.rho, target, config.risk_free_return};
    const portopt::ReplicaPrediction p = portopt::predict(moments, alpha, c);
    const double cal_y = p.cal_slope * (target - config.risk_free_return);
    table.rows.push_back({target, p.eps, p.sharpe, p.eps_min, p.eps0, p.rho_star, cal_y,
                          p.market_return, p.market_sigma, p.cal_slope});
  }
  portopt::write_csv(table, flags.out_path);
  std::cerr << "analytic: wrote " << table.rows.size() << " grid points to "
            << flags.out_path << " (alpha=" << alpha << ")\n";
  return kExitOk;
}

int cmd_simulate(const CommonFlags& flags) {
  const portopt::ExperimentConfig config = load_with_overrides(flags);
  std::cerr << "simulate: N=" << config.total_assets << " p=" << config.periods
            << " trials=" << config.trials << " grid=" << config.return_grid.size()
            << " seed=" << config.seed << "\n";
  const portopt::ExperimentSummary summary = portopt::run_experiment(config, flags.threads);
  const portopt::AsymptoticMoments moments =
      portopt::true_moments(config.pareto_r, config.pareto_h);
  const portopt::ComparisonReport comparison =
      portopt::compare_with_theory(summary, moments, config.alpha());

  const auto stat = flags.stat == "stddev" ? portopt::SpreadStat::standard_deviation
                                           : portopt::SpreadStat::standard_error;
  portopt::emit_report(summary, &comparison, flags.out_path,
                       format_for(flags.format, flags.out_path), stat);
  std::cerr << "simulate: " << summary.completed_trials << "/" << config.trials
            << " trials in " << summary.elapsed_seconds << "s, kappa_mean="
            << summary.kappa_mean << ", max|z|=" << comparison.max_abs_z
            << ", max rel=" << comparison.max_rel_err << "\n";
  for (const std::string& failure : summary.failures) {
    std::cerr << "simulate: " << failure << "\n";
  }
  return kExitOk;
}

int cmd_compare(const std::string& theory_path, const std::string& sim_path,
                const std::string& out_path, const std::string& format) {
  const portopt::CsvTable theory = portopt::read_csv(theory_path);
  const portopt::CsvTable sim = portopt::read_csv(sim_path);

  portopt::ExperimentSummary summary;
  const auto r = sim.values("R");
  const auto eps_mean = sim.values("eps_mean");
  const auto eps_stderr = sim.values("eps_stderr");
  const auto sharpe_mean = sim.values("sharpe_mean");
  const auto sharpe_stderr = sim.values("sharpe_stderr");
  summary.grid.resize(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    summary.grid[i].target_return = r[i];
    summary.grid[i].eps_mean = eps_mean[i];
    summary.grid[i].eps_stderr = eps_stderr[i];
    summary.grid[i].sharpe_mean = sharpe_mean[i];
    summary.grid[i].sharpe_stderr = sharpe_stderr[i];
  }

  const portopt::ComparisonReport report = portopt::compare_with_tabulated(
      summary, theory.values("R"), theory.values("eps_theory"),
      theory.values("sharpe_theory"), std::numeric_limits<double>::quiet_NaN());
  portopt::emit_report(report, out_path,
                       format_for(format, out_path));
  std::cerr << "compare: max|z|=" << report.max_abs_z << " max rel=" << report.max_rel_err
            << " -> " << (report.pass ? "pass" : "FAIL") << "\n";
  return report.pass ? kExitOk : kExitFail;
}

int cmd_check(const std::string& suite, std::uint64_t seed) {
  const std::vector<portopt::CheckResult> results = portopt::run_check_suite(suite, seed);
  bool all_pass = true;
  for (const portopt::CheckResult& check : results) {
    all_pass = all_pass && check.pass;
    std::printf("%-4s %-36s residual=%.3e tol=%.0e\n", check.pass ? "PASS" : "FAIL",
                check.name.c_str(), check.residual, check.tolerance);
  }
  return all_pass ? kExitOk : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mean-variance portfolio optimization with a risk-free asset"};
  app.require_subcommand(1);

  CommonFlags flags;

  auto* analytic = app.add_subcommand("analytic", "write closed-form theory curves");
  analytic->add_option("--config", flags.config_path, "experiment config (JSON)")->required();
  analytic->add_option("--out", flags.out_path, "output CSV path")->required();
  analytic->add_option("--sweep", flags.sweep_text, "R sweep lo:hi:step (overrides R_grid)");
  analytic->add_flag("--paper-scale", flags.paper_scale, "use N=1000, p=2000");

  auto* simulate = app.add_subcommand("simulate", "run the Monte Carlo protocol");
  simulate->add_option("--config", flags.config_path, "experiment config (JSON)")->required();
  simulate->add_option("--out", flags.out_path, "output path")->required();
  simulate->add_option("--sweep", flags.sweep_text, "R sweep lo:hi:step (overrides R_grid)");
  std::uint64_t seed_value = 0;
  auto* seed_opt = simulate->add_option("--seed", seed_value, "override config seed");
  int trials_value = 0;
  auto* trials_opt = simulate->add_option("--trials", trials_value, "override trial count");
  simulate->add_flag("--paper-scale", flags.paper_scale, "use N=1000, p=2000");
  simulate->add_option("--stat", flags.stat, "spread statistic: stderr or stddev")
      ->check(CLI::IsMember({"stderr", "stddev"}));
  simulate->add_option("--format", flags.format, "csv, json, or auto by extension")
      ->check(CLI::IsMember({"csv", "json", "auto"}));
  simulate->add_option("--threads", flags.threads, "worker threads (0 = hardware)");

  std::string theory_path, sim_path;
  auto* compare = app.add_subcommand("compare", "compare simulation against theory curves");
  compare->add_option("--theory", theory_path, "analytic curves CSV")->required();
  compare->add_option("--sim", sim_path, "simulation report CSV")->required();
  compare->add_option("--out", flags.out_path, "comparison report path")->required();
  compare->add_option("--format", flags.format, "csv, json, or auto by extension")
      ->check(CLI::IsMember({"csv", "json", "auto"}));

  std::string suite;
  std::uint64_t check_seed = 20240501;
  auto* check = app.add_subcommand("check", "run an invariant suite");
  check->add_option("suite", suite, "identities, duality, tobin, or oracle")->required();
  check->add_option("--seed", check_seed, "suite RNG seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  if (seed_opt->count() > 0) flags.seed = seed_value;
  if (trials_opt->count() > 0) flags.trials = trials_value;

  if ((analytic->parsed() || simulate->parsed()) && !flags.sweep_text.empty()) {
    const auto sweep = parse_sweep(flags.sweep_text);
    if (!sweep) {
      std::cerr << "usage error: bad --sweep, expected lo:hi:step\n";
      return kExitUsage;
    }
    if (expand_sweep(*sweep).empty()) {
      std::cerr << "usage error: --sweep expands to an empty grid\n";
      return kExitUsage;
    }
  }

  try {
    if (analytic->parsed()) return cmd_analytic(flags);
    if (simulate->parsed()) return cmd_simulate(flags);
    if (compare->parsed()) return cmd_compare(theory_path, sim_path, flags.out_path, flags.format);
    if (check->parsed()) {
      const auto names = portopt::check_suite_names();
      if (std::find(names.begin(), names.end(), suite) == names.end()) {
        std::cerr << "usage error: unknown suite '" << suite << "'\n";
        return kExitUsage;
      }
      return cmd_check(suite, check_seed);
    }
  } catch (const portopt::ExperimentError& e) {
    std::cerr << "experiment failed: " << e.what() << "\n";
    return kExitExperiment;
  } catch (const portopt::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const portopt::ConfigError& e) {
    // Semantic config violations are domain errors for analytic and
    // simulate; unreadable data files are data errors for compare.
    if (compare->parsed()) {
      std::cerr << "data error: " << e.what() << "\n";
      return kExitData;
    }
    std::cerr << "domain error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const portopt::Error& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kExitDomain;
  }
  return kExitUsage;
}
