#pragma once

#include <Eigen/Core>

#include "portopt/market.hpp"
#include "portopt/moments.hpp"

namespace portopt {

/// Budget and expected-return constraint targets. rho is the fraction
/// of wealth held in the risk-free asset; no sign restrictions (short
/// selling and leverage are allowed).
struct ConstraintSpec {
  double rho = 0.0;
  double target_return = 0.0;     // R
  double risk_free_return = 0.0;  // R0

  double budget() const { return 1.0 - rho; }
  double excess_return() const { return target_return - rho * risk_free_return; }
};

struct Multipliers {
  double k = 0.0;
  double theta = 0.0;
};

struct PortfolioSolution {
  Eigen::VectorXd weights;  // risky weights, length N-1
  double k = 0.0;
  double theta = 0.0;
  double risk = 0.0;    // minimal investment risk per asset
  double sharpe = 0.0;  // NaN when risk == 0
  double rho = 0.0;
};

struct DualSolution {
  double tau = 0.0;
  double k = 0.0;
  Eigen::VectorXd weights;
  double max_return = 0.0;  // R attaining the risk budget
};

/// Finite-market solver over one disorder realization. Factorizes J
/// once (inside WishartMatrix) and keeps the two linear solves
/// a = J^-1 e and b = J^-1 r; every quantity below is a closed form in
/// those. Immutable after construction, safe to share across threads.
class QuenchedSolver {
 public:
  QuenchedSolver(const WishartMatrix& wishart, const AssetEnsemble& ensemble);

  const GMoments& gmoments() const { return g_; }
  const Eigen::VectorXd& budget_solve() const { return a_; }  // J^-1 e
  const Eigen::VectorXd& return_solve() const { return b_; }  // J^-1 r
  int total_assets() const { return total_assets_; }

  /// Closed-form Lagrange multipliers; throws DegenerateConstraintsError
  /// when the g-based V1 is at rounding level.
  Multipliers multipliers(const ConstraintSpec& constraints) const;

  /// w* = k J^-1 e + theta J^-1 r.
  Eigen::VectorXd portfolio(const Multipliers& m) const;

  /// Minimal investment risk per asset, N/(N-1) (k (1-rho) + theta (R-rho R0))/2.
  double minimal_risk(const ConstraintSpec& constraints) const;

  /// Multipliers, weights, risk and Sharpe ratio in one pass.
  PortfolioSolution solve(const ConstraintSpec& constraints) const;

  /// Finite-market analogue of the optimal risk-free ratio, built from
  /// g-based R1, V1.
  double rho_star(double target_return, double risk_free_return) const;

  /// Tangency (market) portfolio: theta* J^-1 (r - R0 e) evaluated at
  /// rho = rho_star(R). Direction is independent of R by construction.
  /// Pass rho_override to use an externally supplied rho (e.g. the
  /// replica rho*) instead of the g-based one.
  Eigen::VectorXd market_portfolio(double target_return, double risk_free_return) const;
  Eigen::VectorXd market_portfolio(double target_return, double risk_free_return,
                                   double rho_override) const;

  /// Expected-return maximization under a risk budget (the dual).
  /// eps_target uses the same per-asset convention as minimal_risk.
  /// A risk budget exactly at the minimum-variance point yields the
  /// limiting solution (infinite tau, minimum-variance weights).
  DualSolution dual_max_return(double rho, double eps_target) const;

 private:
  int total_assets_ = 0;
  double risk_free_return_ = 0.0;
  Eigen::VectorXd a_;
  Eigen::VectorXd b_;
  GMoments g_;
};

// Operation-shaped wrappers.

GMoments wishart_gmoments(const WishartMatrix& wishart, const AssetEnsemble& ensemble);
Multipliers lagrange_multipliers(const GMoments& g, const ConstraintSpec& constraints);
double minimal_risk(const GMoments& g, const ConstraintSpec& constraints, int total_assets);

/// S = (R - rho R0)/sqrt(2 eps); eps must be positive.
double sharpe_ratio(double eps, const ConstraintSpec& constraints);

}  // namespace portopt
