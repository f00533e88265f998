#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "portopt/market.hpp"
#include "portopt/moments.hpp"
#include "portopt/quenched.hpp"

namespace portopt {

/// One Monte Carlo experiment: market size, constraint targets, return
/// distributions, the R grid, and the master seed.
struct ExperimentConfig {
  int total_assets = 250;  // N
  int periods = 500;       // p
  double rho = 0.1;
  double risk_free_return = 1.0;  // R0
  ParetoParams pareto_r{1.0, 2.0, 2.0};
  ParetoParams pareto_h{1.0, 2.0, 2.0};
  ReturnDistribution dist = ReturnDistribution::gaussian;
  std::vector<double> return_grid;  // R values
  int trials = 100;
  std::uint64_t seed = 1;

  double alpha() const {
    return static_cast<double>(periods) / (total_assets - 1);
  }
  void validate() const;  // throws ConfigError
};

ExperimentConfig load_config(const std::filesystem::path& path);
void save_config(const ExperimentConfig& config, const std::filesystem::path& path);

/// Stream seed for trial t (documented contract: seed xor t, expanded
/// by splitmix64 inside the generators).
inline std::uint64_t trial_stream_seed(std::uint64_t seed, int trial) {
  return seed ^ static_cast<std::uint64_t>(trial);
}
/// Substream indices within a trial.
inline std::uint64_t ensemble_seed(std::uint64_t trial_seed) {
  return derive_stream(trial_seed, 0);
}
inline std::uint64_t returns_seed(std::uint64_t trial_seed) {
  return derive_stream(trial_seed, 1);
}

struct TrialResult {
  int trial_index = 0;
  bool failed = false;
  std::string failure_reason;
  GMoments g;
  std::vector<double> eps;     // per grid point
  std::vector<double> sharpe;  // per grid point
  std::vector<double> kappa;   // per grid point
};

/// Steps 1-5 once (one market draw), then Step 6 per grid point reusing
/// the same g-moments; kappa divides the exact annealed risk on the
/// same ensemble by the quenched risk. A singular J marks the trial
/// failed instead of throwing.
TrialResult run_trial(const ExperimentConfig& config, int trial_index);

struct GridStats {
  double target_return = 0.0;  // R
  double eps_mean = 0.0, eps_std = 0.0, eps_stderr = 0.0;
  double sharpe_mean = 0.0, sharpe_std = 0.0, sharpe_stderr = 0.0;
  double kappa_mean = 0.0;
};

struct ExperimentSummary {
  ExperimentConfig config;
  double alpha = 0.0;
  double elapsed_seconds = 0.0;
  int completed_trials = 0;
  std::vector<std::string> failures;  // per failed trial: "trial 7: <reason>"
  std::vector<GridStats> grid;
  std::vector<double> kappa_per_trial;  // grid-averaged
  double kappa_mean = 0.0;
  double kappa_stderr = 0.0;
};

using TrialSeeder = std::function<std::uint64_t(int)>;

/// Runs all trials (in parallel across `threads` workers when > 1; 0
/// picks the hardware count) and aggregates in trial-index order, so
/// the summary is identical for any worker count. Throws
/// ExperimentError when more than 10% of trials fail.
ExperimentSummary run_experiment(const ExperimentConfig& config, int threads = 0);

/// Test hook: same, with a custom trial->stream map.
ExperimentSummary run_experiment_seeded(const ExperimentConfig& config,
                                        const TrialSeeder& seeder, int threads = 0);

/// Aggregation alone (exposed so failure paths are testable).
ExperimentSummary summarize_trials(const ExperimentConfig& config,
                                   const std::vector<TrialResult>& results,
                                   double elapsed_seconds);

struct ComparisonRow {
  double target_return = 0.0;
  double eps_mean = 0.0, eps_stderr = 0.0, eps_theory = 0.0;
  double z_eps = 0.0, rel_eps = 0.0;
  double sharpe_mean = 0.0, sharpe_stderr = 0.0, sharpe_theory = 0.0;
  double z_sharpe = 0.0, rel_sharpe = 0.0;
};

struct ComparisonReport {
  double alpha = 0.0;
  std::vector<ComparisonRow> rows;
  double max_abs_z = 0.0;
  double max_rel_err = 0.0;
  bool pass = false;  // max |z| <= 3 and max relative error <= 5%
};

/// Grid-by-grid z-scores and relative errors of the summary against the
/// closed-form theory at the given moments.
ComparisonReport compare_with_theory(const ExperimentSummary& summary,
                                     const AsymptoticMoments& m_true, double alpha);

/// Same z/rel computation from already-tabulated theory values
/// (used by the compare command, which reads theory from a file).
ComparisonReport compare_with_tabulated(const ExperimentSummary& summary,
                                        const std::vector<double>& grid,
                                        const std::vector<double>& eps_theory,
                                        const std::vector<double>& sharpe_theory,
                                        double alpha);

enum class SpreadStat { standard_error, standard_deviation };
enum class ReportFormat { csv, json };

/// Writes the simulation report; columns R, eps_mean, eps_stderr,
/// eps_theory, sharpe_mean, sharpe_stderr, sharpe_theory, z_eps,
/// z_sharpe. `comparison` supplies the theory columns (NaN when null).
/// The spread columns carry the standard error by default, or the
/// standard deviation under SpreadStat::standard_deviation.
void emit_report(const ExperimentSummary& summary, const ComparisonReport* comparison,
                 const std::filesystem::path& path, ReportFormat format,
                 SpreadStat stat = SpreadStat::standard_error);

/// Writes a comparison report on its own (same row schema plus the
/// pass/max metadata in JSON).
void emit_report(const ComparisonReport& report, const std::filesystem::path& path,
                 ReportFormat format);

}  // namespace portopt
