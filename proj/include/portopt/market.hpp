#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include "portopt/moments.hpp"

namespace portopt {

/// Bounded Pareto distribution with density proportional to x^-c on
/// [lower, upper].
struct ParetoParams {
  double lower = 1.0;
  double upper = 2.0;
  double exponent = 2.0;  // c

  void validate() const;  // throws ParamDomainError
};

/// Draw `count` values by inverse-CDF transform. Deterministic given
/// the seed.
std::vector<double> sample_bounded_pareto(const ParetoParams& params, int count,
                                          std::uint64_t seed);

/// E[X^k] of the bounded Pareto (k may be negative).
double pareto_power_moment(const ParetoParams& params, int k);
/// E[log X] of the bounded Pareto.
double pareto_log_moment(const ParetoParams& params);
/// Analytic CDF at x (0 below the support, 1 above).
double pareto_cdf(const ParetoParams& params, double x);

/// Market of `total_assets` assets; the last one is risk-free with
/// return risk_free_return and zero variance, the remaining
/// total_assets-1 risky assets carry per-asset mean returns and
/// variances.
struct AssetEnsemble {
  int total_assets = 0;           // N, risk-free included
  double risk_free_return = 0.0;  // R0
  Eigen::VectorXd mean_return;    // r_i, length N-1
  Eigen::VectorXd variance;       // v_i, length N-1

  int risky_count() const { return total_assets - 1; }
  void validate() const;  // throws ParamDomainError
};

/// Step 1: draw r_i and h_i from their bounded Pareto distributions and
/// set v_i = h_i r_i^2.
AssetEnsemble build_ensemble(const ParetoParams& pareto_r, const ParetoParams& pareto_h,
                             int total_assets, double risk_free_return,
                             std::uint64_t seed);

enum class ReturnDistribution { gaussian, shifted_uniform };

/// Parses "gaussian" / "shifted_uniform"; anything else is a ConfigError.
ReturnDistribution parse_return_distribution(std::string_view name);
std::string_view to_string(ReturnDistribution dist);

/// Mean-centered return data, already scaled by 1/sqrt(N); entry (i, mu)
/// is (xbar_{i mu} - r_i)/sqrt(N), so J = X X^T needs no further scaling.
struct ReturnMatrix {
  Eigen::MatrixXd scaled;  // (N-1) x p
  int total_assets = 0;
  int periods = 0;
};

/// Step 2: sample per-period returns with mean r_i and variance v_i
/// under the requested distribution, center, and scale by 1/sqrt(N).
ReturnMatrix sample_return_matrix(const AssetEnsemble& ensemble, int periods,
                                  ReturnDistribution dist, std::uint64_t seed);

/// J = X X^T, kept together with its Cholesky factor. Construction
/// verifies positive definiteness; the factor is immutable afterwards
/// and safe to share across threads.
class WishartMatrix {
 public:
  WishartMatrix(Eigen::MatrixXd j, int total_assets);

  const Eigen::MatrixXd& matrix() const { return j_; }
  int total_assets() const { return total_assets_; }
  int dim() const { return static_cast<int>(j_.rows()); }

  /// Solves J x = rhs through the cached factorization.
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const { return llt_.solve(rhs); }

 private:
  Eigen::MatrixXd j_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  int total_assets_ = 0;
};

/// Step 3 (without the inverse): builds J symmetrically from X.
WishartMatrix wishart(const ReturnMatrix& returns);

/// The seven bracket averages over the N-1 risky assets, plus the
/// derived R1, V1, R2, V2 through AsymptoticMoments.
AsymptoticMoments empirical_moments(const AssetEnsemble& ensemble);

/// True-distribution moments for r ~ pareto_r, h ~ pareto_h, v = h r^2.
AsymptoticMoments true_moments(const ParetoParams& pareto_r, const ParetoParams& pareto_h);

// Debug dumps.
void write_ensemble_csv(const AssetEnsemble& ensemble, const std::filesystem::path& path);
void write_return_matrix_csv(const ReturnMatrix& returns, const std::filesystem::path& path);

}  // namespace portopt
