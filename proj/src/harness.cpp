#include "portopt/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "portopt/annealed.hpp"
#include "portopt/csv.hpp"
#include "portopt/errors.hpp"
#include "portopt/replica.hpp"

namespace portopt {

using nlohmann::json;

void ExperimentConfig::validate() const {
  if (total_assets < 3) throw ConfigError("N must be at least 3");
  if (periods <= total_assets) {
    std::ostringstream msg;
    msg << "theory requires p > N, got p=" << periods << ", N=" << total_assets;
    throw ConfigError(msg.str());
  }
  if (trials < 2) throw ConfigError("at least 2 trials are required");
  if (return_grid.empty()) throw ConfigError("R grid must not be empty");
  try {
    pareto_r.validate();
    pareto_h.validate();
  } catch (const ParamDomainError& e) {
    throw ConfigError(e.what());
  }
}

namespace {

json pareto_to_json(const ParetoParams& p) {
  return json{{"l", p.lower}, {"u", p.upper}, {"c", p.exponent}};
}

ParetoParams pareto_from_json(const json& j) {
  return ParetoParams{j.at("l").get<double>(), j.at("u").get<double>(),
                      j.at("c").get<double>()};
}

json config_to_json(const ExperimentConfig& c) {
  return json{{"N", c.total_assets},
              {"p", c.periods},
              {"rho", c.rho},
              {"R0", c.risk_free_return},
              {"pareto_r", pareto_to_json(c.pareto_r)},
              {"pareto_h", pareto_to_json(c.pareto_h)},
              {"dist_kind", std::string(to_string(c.dist))},
              {"R_grid", c.return_grid},
              {"trials", c.trials},
              {"seed", c.seed}};
}

TrialResult run_trial_with_stream(const ExperimentConfig& config, int trial_index,
                                  std::uint64_t stream) {
  TrialResult result;
  result.trial_index = trial_index;
  result.eps.assign(config.return_grid.size(), std::numeric_limits<double>::quiet_NaN());
  result.sharpe = result.eps;
  result.kappa = result.eps;
  try {
    const AssetEnsemble ensemble =
        build_ensemble(config.pareto_r, config.pareto_h, config.total_assets,
                       config.risk_free_return, ensemble_seed(stream));
    const ReturnMatrix returns =
        sample_return_matrix(ensemble, config.periods, config.dist, returns_seed(stream));
    const WishartMatrix j = wishart(returns);
    const QuenchedSolver solver(j, ensemble);
    result.g = solver.gmoments();

    const double alpha = config.alpha();
    for (std::size_t i = 0; i < config.return_grid.size(); ++i) {
      const ConstraintSpec constraints{config.rho, config.return_grid[i],
                                       config.risk_free_return};
      const double eps = solver.minimal_risk(constraints);
      result.eps[i] = eps;
      if (eps > 0.0) {
        result.sharpe[i] = sharpe_ratio(eps, constraints);
        result.kappa[i] = annealed_solve(ensemble, constraints, alpha).risk / eps;
      }
    }
  } catch (const std::exception& e) {
    result.failed = true;
    result.failure_reason = e.what();
  }
  return result;
}

struct Stats {
  double mean = 0.0;
  double stddev = 0.0;
  double stderr_ = 0.0;
};

Stats stats_of(const std::vector<double>& values) {
  Stats s;
  if (values.empty()) return s;
  const auto n = static_cast<double>(values.size());
  for (double v : values) s.mean += v;
  s.mean /= n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / (n - 1.0));
    s.stderr_ = s.stddev / std::sqrt(n);
  }
  return s;
}

}  // namespace

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("bad JSON in " + path.string() + ": " + e.what());
  }
  ExperimentConfig c;
  try {
    c.total_assets = j.at("N").get<int>();
    c.periods = j.at("p").get<int>();
    c.rho = j.at("rho").get<double>();
    c.risk_free_return = j.at("R0").get<double>();
    c.pareto_r = pareto_from_json(j.at("pareto_r"));
    c.pareto_h = pareto_from_json(j.at("pareto_h"));
    c.dist = parse_return_distribution(j.at("dist_kind").get<std::string>());
    c.return_grid = j.at("R_grid").get<std::vector<double>>();
    c.trials = j.at("trials").get<int>();
    c.seed = j.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw ConfigError("bad config " + path.string() + ": " + e.what());
  }
  c.validate();
  return c;
}

void save_config(const ExperimentConfig& config, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << config_to_json(config).dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

TrialResult run_trial(const ExperimentConfig& config, int trial_index) {
  return run_trial_with_stream(config, trial_index,
                               trial_stream_seed(config.seed, trial_index));
}

ExperimentSummary run_experiment(const ExperimentConfig& config, int threads) {
  return run_experiment_seeded(
      config, [&config](int t) { return trial_stream_seed(config.seed, t); }, threads);
}

ExperimentSummary run_experiment_seeded(const ExperimentConfig& config,
                                        const TrialSeeder& seeder, int threads) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();

  std::vector<TrialResult> results(static_cast<std::size_t>(config.trials));
  int workers = threads > 0 ? threads
                            : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, config.trials);

  if (workers == 1) {
    for (int t = 0; t < config.trials; ++t) {
      results[static_cast<std::size_t>(t)] = run_trial_with_stream(config, t, seeder(t));
    }
  } else {
    std::atomic<int> next{0};
    auto work = [&] {
      for (int t = next.fetch_add(1); t < config.trials; t = next.fetch_add(1)) {
        results[static_cast<std::size_t>(t)] = run_trial_with_stream(config, t, seeder(t));
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& thread : pool) thread.join();
  }

  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
  return summarize_trials(config, results, elapsed.count());
}

ExperimentSummary summarize_trials(const ExperimentConfig& config,
                                   const std::vector<TrialResult>& results,
                                   double elapsed_seconds) {
  ExperimentSummary summary;
  summary.config = config;
  summary.alpha = config.alpha();
  summary.elapsed_seconds = elapsed_seconds;

  for (const TrialResult& r : results) {
    if (r.failed) {
      std::ostringstream msg;
      msg << "trial " << r.trial_index << ": " << r.failure_reason;
      summary.failures.push_back(msg.str());
    } else {
      ++summary.completed_trials;
    }
  }
  const auto failed = static_cast<double>(summary.failures.size());
  if (failed > 0.1 * static_cast<double>(results.size())) {
    std::ostringstream msg;
    msg << summary.failures.size() << "/" << results.size() << " trials failed; first: "
        << summary.failures.front();
    throw ExperimentError(msg.str());
  }

  summary.grid.resize(config.return_grid.size());
  std::vector<double> column;
  for (std::size_t i = 0; i < config.return_grid.size(); ++i) {
    GridStats& gs = summary.grid[i];
    gs.target_return = config.return_grid[i];

    column.clear();
    for (const TrialResult& r : results) {
      if (!r.failed) column.push_back(r.eps[i]);
    }
    Stats eps = stats_of(column);
    gs.eps_mean = eps.mean;
    gs.eps_std = eps.stddev;
    gs.eps_stderr = eps.stderr_;

    column.clear();
    for (const TrialResult& r : results) {
      if (!r.failed) column.push_back(r.sharpe[i]);
    }
    Stats sharpe = stats_of(column);
    gs.sharpe_mean = sharpe.mean;
    gs.sharpe_std = sharpe.stddev;
    gs.sharpe_stderr = sharpe.stderr_;

    column.clear();
    for (const TrialResult& r : results) {
      if (!r.failed) column.push_back(r.kappa[i]);
    }
    gs.kappa_mean = stats_of(column).mean;
  }

  for (const TrialResult& r : results) {
    if (r.failed) continue;
    double acc = 0.0;
    for (double k : r.kappa) acc += k;
    summary.kappa_per_trial.push_back(acc / static_cast<double>(r.kappa.size()));
  }
  const Stats kappa = stats_of(summary.kappa_per_trial);
  summary.kappa_mean = kappa.mean;
  summary.kappa_stderr = kappa.stderr_;
  return summary;
}

namespace {

ComparisonReport compare_rows(const ExperimentSummary& summary,
                              const std::vector<double>& eps_theory,
                              const std::vector<double>& sharpe_theory, double alpha) {
  ComparisonReport report;
  report.alpha = alpha;
  report.rows.resize(summary.grid.size());
  for (std::size_t i = 0; i < summary.grid.size(); ++i) {
    const GridStats& gs = summary.grid[i];
    ComparisonRow& row = report.rows[i];
    row.target_return = gs.target_return;
    row.eps_mean = gs.eps_mean;
    row.eps_stderr = gs.eps_stderr;
    row.eps_theory = eps_theory[i];
    row.sharpe_mean = gs.sharpe_mean;
    row.sharpe_stderr = gs.sharpe_stderr;
    row.sharpe_theory = sharpe_theory[i];

    auto zscore = [](double mean, double theory, double stderr_) {
      const double diff = mean - theory;
      if (stderr_ > 0.0) return diff / stderr_;
      return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    };
    auto relative = [](double mean, double theory) {
      const double diff = std::abs(mean - theory);
      if (theory != 0.0) return diff / std::abs(theory);
      return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    };
    row.z_eps = zscore(gs.eps_mean, row.eps_theory, gs.eps_stderr);
    row.rel_eps = relative(gs.eps_mean, row.eps_theory);
    row.z_sharpe = zscore(gs.sharpe_mean, row.sharpe_theory, gs.sharpe_stderr);
    row.rel_sharpe = relative(gs.sharpe_mean, row.sharpe_theory);

    for (double value : {std::abs(row.z_eps), std::abs(row.z_sharpe)}) {
      report.max_abs_z = std::isnan(value) ? std::numeric_limits<double>::infinity()
                                           : std::max(report.max_abs_z, value);
    }
    for (double value : {row.rel_eps, row.rel_sharpe}) {
      report.max_rel_err = std::isnan(value) ? std::numeric_limits<double>::infinity()
                                             : std::max(report.max_rel_err, value);
    }
  }
  report.pass = report.max_abs_z <= 3.0 && report.max_rel_err <= 0.05;
  return report;
}

}  // namespace

ComparisonReport compare_with_theory(const ExperimentSummary& summary,
                                     const AsymptoticMoments& m_true, double alpha) {
  std::vector<double> eps_theory;
  std::vector<double> sharpe_theory;
  eps_theory.reserve(summary.grid.size());
  sharpe_theory.reserve(summary.grid.size());
  for (const GridStats& gs : summary.grid) {
    const ConstraintSpec constraints{summary.config.rho, gs.target_return,
                                     summary.config.risk_free_return};
    const double eps = epsilon_quenched(m_true, alpha, constraints);
    eps_theory.push_back(eps);
    sharpe_theory.push_back(eps > 0.0 ? sharpe_ratio(eps, constraints)
                                      : std::numeric_limits<double>::quiet_NaN());
  }
  return compare_rows(summary, eps_theory, sharpe_theory, alpha);
}

ComparisonReport compare_with_tabulated(const ExperimentSummary& summary,
                                        const std::vector<double>& grid,
                                        const std::vector<double>& eps_theory,
                                        const std::vector<double>& sharpe_theory,
                                        double alpha) {
  if (grid.size() != summary.grid.size() || eps_theory.size() != grid.size() ||
      sharpe_theory.size() != grid.size()) {
    throw ConfigError("theory and simulation grids have different sizes");
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (std::abs(grid[i] - summary.grid[i].target_return) > 1e-9) {
      std::ostringstream msg;
      msg << "grid mismatch at index " << i << ": theory R=" << grid[i] << ", simulation R="
          << summary.grid[i].target_return;
      throw ConfigError(msg.str());
    }
  }
  return compare_rows(summary, eps_theory, sharpe_theory, alpha);
}

namespace {

const std::vector<std::string> kReportColumns = {
    "R",           "eps_mean",      "eps_stderr",    "eps_theory", "sharpe_mean",
    "sharpe_stderr", "sharpe_theory", "z_eps",         "z_sharpe"};

CsvTable report_table(const ExperimentSummary& summary, const ComparisonReport* comparison,
                      SpreadStat stat) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CsvTable table;
  table.columns = kReportColumns;
  for (std::size_t i = 0; i < summary.grid.size(); ++i) {
    const GridStats& gs = summary.grid[i];
    const bool spread_is_stderr = stat == SpreadStat::standard_error;
    const ComparisonRow* row = comparison ? &comparison->rows[i] : nullptr;
    table.rows.push_back({gs.target_return, gs.eps_mean,
                          spread_is_stderr ? gs.eps_stderr : gs.eps_std,
                          row ? row->eps_theory : nan, gs.sharpe_mean,
                          spread_is_stderr ? gs.sharpe_stderr : gs.sharpe_std,
                          row ? row->sharpe_theory : nan, row ? row->z_eps : nan,
                          row ? row->z_sharpe : nan});
  }
  return table;
}

json rows_to_json(const CsvTable& table) {
  json rows = json::array();
  for (const auto& row : table.rows) {
    json obj;
    for (std::size_t i = 0; i < table.columns.size(); ++i) obj[table.columns[i]] = row[i];
    rows.push_back(std::move(obj));
  }
  return rows;
}

void write_json_file(const json& j, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace

void emit_report(const ExperimentSummary& summary, const ComparisonReport* comparison,
                 const std::filesystem::path& path, ReportFormat format, SpreadStat stat) {
  if (summary.grid.empty()) throw ConfigError("refusing to emit a report for an empty grid");
  const CsvTable table = report_table(summary, comparison, stat);
  if (format == ReportFormat::csv) {
    write_csv(table, path);
    return;
  }
  json j;
  j["metadata"] = {
      {"config", config_to_json(summary.config)},
      {"alpha", summary.alpha},
      {"elapsed_seconds", summary.elapsed_seconds},
      {"completed_trials", summary.completed_trials},
      {"failures", summary.failures},
      {"stat", stat == SpreadStat::standard_error ? "stderr" : "stddev"},
      {"kappa_mean", summary.kappa_mean},
      {"kappa_stderr", summary.kappa_stderr},
      {"kappa_per_trial", summary.kappa_per_trial},
  };
  if (comparison) {
    j["metadata"]["pass"] = comparison->pass;
    j["metadata"]["max_abs_z"] = comparison->max_abs_z;
    j["metadata"]["max_rel_err"] = comparison->max_rel_err;
  }
  j["rows"] = rows_to_json(table);
  write_json_file(j, path);
}

void emit_report(const ComparisonReport& report, const std::filesystem::path& path,
                 ReportFormat format) {
  if (report.rows.empty()) throw ConfigError("refusing to emit a report for an empty grid");
  CsvTable table;
  table.columns = kReportColumns;
  for (const ComparisonRow& row : report.rows) {
    table.rows.push_back({row.target_return, row.eps_mean, row.eps_stderr, row.eps_theory,
                          row.sharpe_mean, row.sharpe_stderr, row.sharpe_theory, row.z_eps,
                          row.z_sharpe});
  }
  if (format == ReportFormat::csv) {
    write_csv(table, path);
    return;
  }
  json j;
  j["metadata"] = {{"alpha", report.alpha},
                   {"pass", report.pass},
                   {"max_abs_z", report.max_abs_z},
                   {"max_rel_err", report.max_rel_err}};
  j["rows"] = rows_to_json(table);
  write_json_file(j, path);
}

}  // namespace portopt
