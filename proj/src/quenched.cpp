#include "portopt/quenched.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "portopt/errors.hpp"

namespace portopt {

namespace {

constexpr double kDegenerate = 1e-12;

void check_nondegenerate(const GMoments& g) {
  const double scale = std::max(1.0, g.g2 / g.g0);
  if (!(g.weighted_variance() > kDegenerate * scale)) {
    throw DegenerateConstraintsError(
        "budget and return constraints are collinear (g-based V1 at rounding level)");
  }
}

}  // namespace

QuenchedSolver::QuenchedSolver(const WishartMatrix& wishart, const AssetEnsemble& ensemble)
    : total_assets_(ensemble.total_assets), risk_free_return_(ensemble.risk_free_return) {
  ensemble.validate();
  if (wishart.dim() != ensemble.risky_count() ||
      wishart.total_assets() != ensemble.total_assets) {
    throw ParamDomainError("Wishart matrix and ensemble dimensions disagree");
  }
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(wishart.dim());
  a_ = wishart.solve(ones);
  b_ = wishart.solve(ensemble.mean_return);
  const double inv_n = 1.0 / total_assets_;
  g_.g0 = ones.dot(a_) * inv_n;
  g_.g1 = ensemble.mean_return.dot(a_) * inv_n;
  g_.g2 = ensemble.mean_return.dot(b_) * inv_n;
}

Multipliers QuenchedSolver::multipliers(const ConstraintSpec& constraints) const {
  return lagrange_multipliers(g_, constraints);
}

Eigen::VectorXd QuenchedSolver::portfolio(const Multipliers& m) const {
  return m.k * a_ + m.theta * b_;
}

double QuenchedSolver::minimal_risk(const ConstraintSpec& constraints) const {
  return portopt::minimal_risk(g_, constraints, total_assets_);
}

PortfolioSolution QuenchedSolver::solve(const ConstraintSpec& constraints) const {
  PortfolioSolution s;
  const Multipliers m = multipliers(constraints);
  s.k = m.k;
  s.theta = m.theta;
  s.weights = portfolio(m);
  s.rho = constraints.rho;
  s.risk = minimal_risk(constraints);
  s.sharpe = s.risk > 0.0 ? sharpe_ratio(s.risk, constraints)
                          : std::numeric_limits<double>::quiet_NaN();
  return s;
}

double QuenchedSolver::rho_star(double target_return, double risk_free_return) const {
  const double mean = g_.weighted_mean();
  const double var = g_.weighted_variance();
  const double denom = var + (mean - risk_free_return) * (mean - risk_free_return);
  if (!(denom > kDegenerate * std::max(1.0, g_.g2 / g_.g0))) {
    throw DegenerateConstraintsError(
        "rho* undefined: risky returns indistinguishable from the risk-free rate");
  }
  return (var + (target_return - mean) * (risk_free_return - mean)) / denom;
}

Eigen::VectorXd QuenchedSolver::market_portfolio(double target_return,
                                                 double risk_free_return) const {
  const double mean = g_.weighted_mean();
  const double var = g_.weighted_variance();
  const double denom = var + (mean - risk_free_return) * (mean - risk_free_return);
  if (!(denom > kDegenerate * std::max(1.0, g_.g2 / g_.g0))) {
    throw DegenerateConstraintsError(
        "market portfolio undefined: r - R0 e direction vanishes");
  }
  // theta* at rho = rho*(R); k* = -R0 theta* makes w = theta* J^-1 (r - R0 e)
  const double theta = (target_return - risk_free_return) / (g_.g0 * denom);
  return theta * (b_ - risk_free_return * a_);
}

Eigen::VectorXd QuenchedSolver::market_portfolio(double target_return,
                                                 double risk_free_return,
                                                 double rho_override) const {
  ConstraintSpec constraints{rho_override, target_return, risk_free_return};
  return portfolio(multipliers(constraints));
}

DualSolution QuenchedSolver::dual_max_return(double rho, double eps_target) const {
  check_nondegenerate(g_);
  const double budget = 1.0 - rho;
  const double mean = g_.weighted_mean();
  const double var = g_.weighted_variance();
  // minimal_risk averages over N-1 assets; the risk-budget constraint
  // of the dual divides by N. Convert so the primal-dual round trip is
  // exact at finite N.
  const double eps_n = eps_target * (total_assets_ - 1) / total_assets_;

  const double radicand = 2.0 * eps_n * g_.g0 - budget * budget;
  const double scale = std::max(std::abs(2.0 * eps_n * g_.g0), budget * budget);
  DualSolution d;
  if (radicand < -kDegenerate * scale) {
    std::ostringstream msg;
    msg << "risk budget " << eps_target << " is below the minimum-variance risk at rho="
        << rho;
    throw InfeasibleRiskBudgetError(msg.str());
  }
  if (radicand <= kDegenerate * scale) {
    // Minimum-variance boundary: tau diverges and the portfolio tends
    // to the pure budget direction.
    d.tau = std::numeric_limits<double>::infinity();
    d.k = std::numeric_limits<double>::infinity();
    d.weights = (budget / g_.g0) * a_;
    d.max_return = rho * risk_free_return_ + budget * mean;
    return d;
  }
  const double root = std::sqrt(var / radicand);
  d.tau = g_.g0 * root;
  d.k = budget * root - mean;
  d.weights = (d.k / d.tau) * a_ + (1.0 / d.tau) * b_;
  d.max_return = rho * risk_free_return_ + budget * mean + std::sqrt(var * radicand);
  return d;
}

GMoments wishart_gmoments(const WishartMatrix& wishart, const AssetEnsemble& ensemble) {
  return QuenchedSolver(wishart, ensemble).gmoments();
}

Multipliers lagrange_multipliers(const GMoments& g, const ConstraintSpec& constraints) {
  if (!(g.g0 > 0.0)) throw DegenerateConstraintsError("g(0) must be positive");
  check_nondegenerate(g);
  const double budget = constraints.budget();
  const double excess = constraints.excess_return();
  const double mean = g.weighted_mean();
  const double var = g.weighted_variance();
  const double inv = 1.0 / (var * g.g0);
  Multipliers m;
  m.k = inv * (budget * (g.g2 / g.g0) - excess * mean);
  m.theta = inv * (excess - budget * mean);
  return m;
}

double minimal_risk(const GMoments& g, const ConstraintSpec& constraints, int total_assets) {
  const Multipliers m = lagrange_multipliers(g, constraints);
  const double per_n =
      0.5 * (m.k * constraints.budget() + m.theta * constraints.excess_return());
  return per_n * total_assets / (total_assets - 1);
}

double sharpe_ratio(double eps, const ConstraintSpec& constraints) {
  if (!(eps > 0.0)) {
    std::ostringstream msg;
    msg << "Sharpe ratio undefined for nonpositive risk " << eps;
    throw ParamDomainError(msg.str());
  }
  return constraints.excess_return() / std::sqrt(2.0 * eps);
}

}  // namespace portopt
