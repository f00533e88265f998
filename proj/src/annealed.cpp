#include "portopt/annealed.hpp"

#include "portopt/errors.hpp"

namespace portopt {

namespace {

// g-moments of the diagonal expected Hessian alpha * diag(v).
GMoments diagonal_gmoments(const AssetEnsemble& ensemble, double alpha) {
  GMoments g;
  for (int i = 0; i < ensemble.risky_count(); ++i) {
    const double inv = 1.0 / (alpha * ensemble.variance[i]);
    const double r = ensemble.mean_return[i];
    g.g0 += inv;
    g.g1 += inv * r;
    g.g2 += inv * r * r;
  }
  const double inv_n = 1.0 / ensemble.total_assets;
  g.g0 *= inv_n;
  g.g1 *= inv_n;
  g.g2 *= inv_n;
  return g;
}

}  // namespace

AnnealedSolution annealed_solve(const AssetEnsemble& ensemble,
                                const ConstraintSpec& constraints, double alpha) {
  ensemble.validate();
  if (!(alpha > 0.0)) throw ParamDomainError("alpha must be positive");

  const GMoments g = diagonal_gmoments(ensemble, alpha);
  const Multipliers m = lagrange_multipliers(g, constraints);

  AnnealedSolution s;
  s.k = m.k;
  s.theta = m.theta;
  s.weights.resize(ensemble.risky_count());
  for (int i = 0; i < ensemble.risky_count(); ++i) {
    s.weights[i] = (m.k + m.theta * ensemble.mean_return[i]) / (alpha * ensemble.variance[i]);
  }
  s.risk = minimal_risk(g, constraints, ensemble.total_assets);
  return s;
}

Eigen::VectorXd annealed_portfolio(const AssetEnsemble& ensemble,
                                   const ConstraintSpec& constraints, double alpha) {
  return annealed_solve(ensemble, constraints, alpha).weights;
}

double annealed_min_risk(const AsymptoticMoments& m, const ConstraintSpec& constraints,
                         double alpha) {
  if (!(alpha > 0.0)) throw ParamDomainError("alpha must be positive");
  const double v1 = m.v1();
  if (!(v1 > 0.0)) {
    throw DegenerateConstraintsError("annealed risk undefined for V1 <= 0");
  }
  const double budget = constraints.budget();
  const double gap = constraints.excess_return() - budget * m.r1();
  return alpha / (2.0 * m.vinv) * (budget * budget + gap * gap / v1);
}

double opportunity_loss(double eps_or, double eps) {
  if (!(eps > 0.0)) throw ParamDomainError("opportunity loss undefined for eps <= 0");
  return eps_or / eps;
}

}  // namespace portopt
