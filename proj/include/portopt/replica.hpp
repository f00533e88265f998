#pragma once

#include "portopt/moments.hpp"
#include "portopt/quenched.hpp"

namespace portopt {

/// Cumulant generating function of the risk minimization problem,
/// phi = -(a/2) log(a/(a-1)) - (1/2) log(a-1) - (1/2)<log v>
///       + <(k + r theta)^2 / v> / (2(a-1)),
/// with a the investment period ratio. Its second derivatives in
/// (k, theta) are the asymptotic g-moments.
double cumulant_phi(const AsymptoticMoments& m, double alpha, double k, double theta);

/// g(0..2) = (<v^-1>, <v^-1 r>, <v^-1 r^2>) / (alpha - 1).
GMoments asymptotic_gmoments(const AsymptoticMoments& m, double alpha);

/// Minimal investment risk per asset,
/// eps = (alpha-1)/(2<v^-1>) [ (1-rho)^2 + (R - rho R0 - (1-rho) R1)^2 / V1 ].
double epsilon_quenched(const AsymptoticMoments& m, double alpha,
                        const ConstraintSpec& constraints);

enum class RhoRegime {
  leverage_risky,     // rho* <= 0: borrow at the risk-free rate, lever risky assets
  mixed,              // 0 < rho* < 1
  leverage_riskfree,  // rho* >= 1: short risky assets into the risk-free one
};

struct RhoStar {
  double value = 0.0;
  RhoRegime regime = RhoRegime::mixed;
  /// True when R1 <= R0; the formula stays valid but the market has no
  /// efficient risky branch (callers may want to warn).
  bool risky_below_riskfree = false;
};

/// rho* = [V1 + (R - R1)(R0 - R1)] / [V1 + (R1 - R0)^2], the risk-free
/// ratio minimizing eps, with its regime classification.
RhoStar rho_star(const AsymptoticMoments& m, double target_return, double risk_free_return);

/// eps at rho*: (alpha-1)/(2<v^-1>) (R-R0)^2 / (V1 + (R1-R0)^2).
double epsilon_min(const AsymptoticMoments& m, double alpha, double target_return,
                   double risk_free_return);

/// Risky-only market baseline: eps0 = (alpha-1)/(2<v^-1>) [1 + (R-R1)^2/V1].
double epsilon_no_riskfree(const AsymptoticMoments& m, double alpha, double target_return);

struct SharpeAnalysis {
  double r_star = 0.0;   // R maximizing the Sharpe ratio
  double s2_star = 0.0;  // S^2(R*) = (V1 + R1^2) <v^-1>/(alpha-1)
  double r_min = 0.0;    // R minimizing eps(R)
  double s2_min = 0.0;   // S^2 at R_min
  double s2_max = 0.0;   // limiting S^2 as R -> infinity
};

/// Sharpe-ratio extrema; s2_star = s2_min + s2_max holds identically.
SharpeAnalysis sharpe_analysis(const AsymptoticMoments& m, double alpha, double rho,
                               double risk_free_return);

struct TobinTangent {
  double market_return = 0.0;  // R_M
  double market_sigma = 0.0;   // y(R_M)
  double cal_slope = 0.0;      // capital allocation line y_A(R) = cal_slope (R - R0)
};

/// Tangent from (R0, 0) to the risky-only frontier y(R) = sqrt(2 eps0).
/// Requires R1 > R0; otherwise there is no tangency on the efficient
/// branch and NoTangencyError is thrown.
TobinTangent tobin_tangent(const AsymptoticMoments& m, double alpha, double risk_free_return);

/// Replica-symmetric saddle point at inverse temperature beta.
struct OrderParameters {
  double beta = 0.0;
  double k = 0.0;
  double theta = 0.0;
  double chi_w = 0.0;
  double q_w = 0.0;
  double chi_s = 0.0;
  double q_s = 0.0;
  double tchi_w = 0.0;  // identically 0
  double tq_w = 0.0;    // identically 0
  double tchi_s = 0.0;
  double tq_s = 0.0;
};

OrderParameters replica_order_parameters(const AsymptoticMoments& m, double alpha,
                                         const ConstraintSpec& constraints, double beta);

/// -d phi / d beta at the order parameters' own beta:
/// alpha chi_s / (2 (1 + beta chi_s)) + alpha q_s / (2 (1 + beta chi_s)^2).
double free_energy_risk(const OrderParameters& op, double alpha);

/// beta -> infinity limit of the above, taken analytically with
/// 1 + beta chi_s = alpha/(alpha-1): eps = q_s (alpha-1)^2 / (2 alpha).
double free_energy_risk_limit(const OrderParameters& op, double alpha);

/// Inverse of epsilon_quenched on the branch R >= rho R0 + (1-rho) R1:
/// R = rho R0 + (1-rho) R1 + sqrt(V1 (2 eps g(0) - (1-rho)^2)).
double dual_max_return_asymptotic(const AsymptoticMoments& m, double alpha, double rho,
                                  double risk_free_return, double eps);

/// Every closed-form prediction for one (moments, alpha, rho, R, R0).
struct ReplicaPrediction {
  double eps = 0.0;
  double sharpe = 0.0;
  double rho_star = 0.0;
  double eps_min = 0.0;
  double eps0 = 0.0;
  double kappa = 0.0;
  double r_star = 0.0;
  double s2_star = 0.0;
  double s2_rmin = 0.0;
  double s2_rmax = 0.0;
  double market_return = 0.0;  // R_M
  double market_sigma = 0.0;   // y(R_M)
  double cal_slope = 0.0;
};

ReplicaPrediction predict(const AsymptoticMoments& m, double alpha,
                          const ConstraintSpec& constraints);

}  // namespace portopt
