#include "portopt/replica.hpp"

#include <cmath>
#include <limits>

#include "portopt/errors.hpp"

namespace portopt {

namespace {

void require_alpha(double alpha) {
  if (!(alpha > 1.0)) throw ParamDomainError("investment period ratio alpha must exceed 1");
}

void require_moments(const AsymptoticMoments& m) {
  if (!(m.vinv > 0.0)) throw ParamDomainError("<v^-1> must be positive");
}

void require_v1(const AsymptoticMoments& m) {
  if (!(m.v1() > 0.0)) {
    throw DegenerateConstraintsError("V1 <= 0: weighted returns carry no dispersion");
  }
}

}  // namespace

double cumulant_phi(const AsymptoticMoments& m, double alpha, double k, double theta) {
  require_alpha(alpha);
  require_moments(m);
  const double quad = k * k * m.vinv + 2.0 * k * theta * m.vinv_r + theta * theta * m.vinv_r2;
  return -0.5 * alpha * std::log(alpha / (alpha - 1.0)) - 0.5 * std::log(alpha - 1.0) -
         0.5 * m.log_v + quad / (2.0 * (alpha - 1.0));
}

GMoments asymptotic_gmoments(const AsymptoticMoments& m, double alpha) {
  require_alpha(alpha);
  require_moments(m);
  const double inv = 1.0 / (alpha - 1.0);
  return GMoments{m.vinv * inv, m.vinv_r * inv, m.vinv_r2 * inv};
}

double epsilon_quenched(const AsymptoticMoments& m, double alpha,
                        const ConstraintSpec& constraints) {
  require_alpha(alpha);
  require_moments(m);
  require_v1(m);
  const double budget = constraints.budget();
  const double gap = constraints.excess_return() - budget * m.r1();
  return (alpha - 1.0) / (2.0 * m.vinv) * (budget * budget + gap * gap / m.v1());
}

RhoStar rho_star(const AsymptoticMoments& m, double target_return, double risk_free_return) {
  require_moments(m);
  const double r1 = m.r1();
  const double v1 = m.v1();
  const double denom = v1 + (r1 - risk_free_return) * (r1 - risk_free_return);
  if (!(denom > 0.0)) {
    throw DegenerateConstraintsError(
        "rho* undefined: V1 = 0 and risky returns equal the risk-free rate");
  }
  RhoStar result;
  result.value = (v1 + (target_return - r1) * (risk_free_return - r1)) / denom;
  result.risky_below_riskfree = r1 <= risk_free_return;
  if (result.value <= 0.0) {
    result.regime = RhoRegime::leverage_risky;
  } else if (result.value < 1.0) {
    result.regime = RhoRegime::mixed;
  } else {
    result.regime = RhoRegime::leverage_riskfree;
  }
  return result;
}

double epsilon_min(const AsymptoticMoments& m, double alpha, double target_return,
                   double risk_free_return) {
  require_alpha(alpha);
  require_moments(m);
  const double r1 = m.r1();
  const double denom = m.v1() + (r1 - risk_free_return) * (r1 - risk_free_return);
  if (!(denom > 0.0)) {
    throw DegenerateConstraintsError("eps_min undefined: degenerate frontier");
  }
  const double excess = target_return - risk_free_return;
  return (alpha - 1.0) / (2.0 * m.vinv) * excess * excess / denom;
}

double epsilon_no_riskfree(const AsymptoticMoments& m, double alpha, double target_return) {
  require_alpha(alpha);
  require_moments(m);
  require_v1(m);
  const double gap = target_return - m.r1();
  return (alpha - 1.0) / (2.0 * m.vinv) * (1.0 + gap * gap / m.v1());
}

SharpeAnalysis sharpe_analysis(const AsymptoticMoments& m, double alpha, double rho,
                               double risk_free_return) {
  require_alpha(alpha);
  require_moments(m);
  require_v1(m);
  const double r1 = m.r1();
  if (r1 == 0.0) {
    throw ParamDomainError(
        "Sharpe maximizer undefined: R1 = 0 leaves no bounded maximum direction");
  }
  const double v1 = m.v1();
  const double scale = m.vinv / (alpha - 1.0);
  SharpeAnalysis s;
  s.r_star = rho * risk_free_return + (1.0 - rho) * (r1 + v1 / r1);
  s.s2_star = (v1 + r1 * r1) * scale;
  s.r_min = rho * risk_free_return + (1.0 - rho) * r1;
  s.s2_min = r1 * r1 * scale;
  s.s2_max = v1 * scale;
  return s;
}

TobinTangent tobin_tangent(const AsymptoticMoments& m, double alpha,
                           double risk_free_return) {
  require_alpha(alpha);
  require_moments(m);
  require_v1(m);
  const double r1 = m.r1();
  if (!(r1 > risk_free_return)) {
    throw NoTangencyError(
        "no tangency portfolio: risky assets do not beat the risk-free return on average");
  }
  const double v1 = m.v1();
  const double gap = r1 - risk_free_return;
  TobinTangent t;
  t.market_return = r1 + v1 / gap;
  t.market_sigma = std::sqrt((alpha - 1.0) / m.vinv * (1.0 + v1 / (gap * gap)));
  t.cal_slope = std::sqrt((alpha - 1.0) / m.vinv) / std::sqrt(v1 + gap * gap);
  return t;
}

OrderParameters replica_order_parameters(const AsymptoticMoments& m, double alpha,
                                         const ConstraintSpec& constraints, double beta) {
  require_alpha(alpha);
  require_moments(m);
  require_v1(m);
  if (!(beta > 0.0)) throw ParamDomainError("inverse temperature beta must be positive");
  if (!(m.vinv2 > 0.0)) throw ParamDomainError("<v^-2> must be positive");

  const double r1 = m.r1();
  const double v1 = m.v1();
  const double r2 = m.r2();
  const double v2 = m.v2();
  const double d2 = v2 + (r2 - r1) * (r2 - r1);
  if (!(d2 > 0.0)) {
    throw DegenerateConstraintsError("V2 + (R2 - R1)^2 must be positive");
  }

  const double budget = constraints.budget();
  const double excess = constraints.excess_return();
  const double blended_gap = constraints.target_return -
                             m.blended_return(constraints.rho, constraints.risk_free_return);
  const double bracket = budget * budget + blended_gap * blended_gap / v1;

  OrderParameters op;
  op.beta = beta;
  op.k = beta * (alpha - 1.0) / (m.vinv * v1) * (budget * (v1 + r1 * r1) - excess * r1);
  op.theta = beta * (alpha - 1.0) / (m.vinv * v1) * (excess - budget * r1);
  op.chi_w = m.vinv / (beta * (alpha - 1.0));
  const double mass_ratio = m.vinv2 / (m.vinv * m.vinv);
  const double shifted = blended_gap + v1 * budget * (r2 - r1) / d2;
  op.q_w = bracket / (alpha - 1.0) + mass_ratio * budget * budget * v2 / d2 +
           mass_ratio * d2 / (v1 * v1) * shifted * shifted;
  op.chi_s = 1.0 / (beta * (alpha - 1.0));
  op.q_s = alpha / ((alpha - 1.0) * m.vinv) * bracket;
  op.tchi_w = 0.0;
  op.tq_w = 0.0;
  op.tchi_s = beta * (alpha - 1.0);
  op.tq_s = beta * beta * (alpha - 1.0) / m.vinv * bracket;
  return op;
}

double free_energy_risk(const OrderParameters& op, double alpha) {
  require_alpha(alpha);
  const double denom = 1.0 + op.beta * op.chi_s;
  return alpha * op.chi_s / (2.0 * denom) + alpha * op.q_s / (2.0 * denom * denom);
}

double free_energy_risk_limit(const OrderParameters& op, double alpha) {
  require_alpha(alpha);
  // 1 + beta chi_s = alpha/(alpha-1) makes the chi_s term vanish as
  // 1/(2 beta) and the q_s term collapse to this closed form.
  return op.q_s * (alpha - 1.0) * (alpha - 1.0) / (2.0 * alpha);
}

double dual_max_return_asymptotic(const AsymptoticMoments& m, double alpha, double rho,
                                  double risk_free_return, double eps) {
  require_alpha(alpha);
  require_moments(m);
  require_v1(m);
  const double g0 = m.vinv / (alpha - 1.0);
  const double budget = 1.0 - rho;
  double radicand = 2.0 * eps * g0 - budget * budget;
  const double scale = std::max(std::abs(2.0 * eps * g0), budget * budget);
  if (radicand < -1e-12 * scale) {
    throw InfeasibleRiskBudgetError("risk budget below the minimum-variance risk");
  }
  radicand = std::max(radicand, 0.0);
  return rho * risk_free_return + budget * m.r1() + std::sqrt(m.v1() * radicand);
}

ReplicaPrediction predict(const AsymptoticMoments& m, double alpha,
                          const ConstraintSpec& constraints) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  ReplicaPrediction p;
  p.eps = epsilon_quenched(m, alpha, constraints);
  p.sharpe = p.eps > 0.0 ? sharpe_ratio(p.eps, constraints) : nan;
  p.rho_star = rho_star(m, constraints.target_return, constraints.risk_free_return).value;
  p.eps_min = epsilon_min(m, alpha, constraints.target_return, constraints.risk_free_return);
  p.eps0 = epsilon_no_riskfree(m, alpha, constraints.target_return);
  p.kappa = alpha / (alpha - 1.0);
  try {
    const SharpeAnalysis s =
        sharpe_analysis(m, alpha, constraints.rho, constraints.risk_free_return);
    p.r_star = s.r_star;
    p.s2_star = s.s2_star;
    p.s2_rmin = s.s2_min;
    p.s2_rmax = s.s2_max;
  } catch (const ParamDomainError&) {
    p.r_star = p.s2_star = p.s2_rmin = p.s2_rmax = nan;
  }
  try {
    const TobinTangent t = tobin_tangent(m, alpha, constraints.risk_free_return);
    p.market_return = t.market_return;
    p.market_sigma = t.market_sigma;
    p.cal_slope = t.cal_slope;
  } catch (const NoTangencyError&) {
    p.market_return = p.market_sigma = p.cal_slope = nan;
  }
  return p;
}

}  // namespace portopt
