#pragma once

#include <Eigen/Core>

#include "portopt/market.hpp"
#include "portopt/moments.hpp"
#include "portopt/quenched.hpp"

namespace portopt {

struct AnnealedSolution {
  Eigen::VectorXd weights;
  double k = 0.0;
  double theta = 0.0;
  double risk = 0.0;  // expected investment risk per asset, same convention as minimal_risk
};

/// Minimizes the expected investment risk (alpha/2) sum v_i w_i^2 under
/// the budget and return constraints. The Hessian is diagonal, so the
/// solution is an exact closed form in the finite-market sums
/// (1/N) sum 1/(alpha v_i), (1/N) sum r_i/(alpha v_i), (1/N) sum r_i^2/(alpha v_i).
AnnealedSolution annealed_solve(const AssetEnsemble& ensemble,
                                const ConstraintSpec& constraints, double alpha);

/// Weights only.
Eigen::VectorXd annealed_portfolio(const AssetEnsemble& ensemble,
                                   const ConstraintSpec& constraints, double alpha);

/// Asymptotic minimal expected investment risk per asset,
/// eps_OR = alpha/(2<v^-1>) [ (1-rho)^2 + (R - rho R0 - (1-rho) R1)^2 / V1 ].
double annealed_min_risk(const AsymptoticMoments& m, const ConstraintSpec& constraints,
                         double alpha);

/// kappa = eps_OR / eps.
double opportunity_loss(double eps_or, double eps);

}  // namespace portopt
