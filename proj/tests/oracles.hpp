// Test-only reference implementations, independent of the library code
// paths they validate: quadrature for distribution moments, an
// explicit-inverse portfolio pipeline, and a chi-square quantile bound.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>

#include "portopt/market.hpp"
#include "portopt/moments.hpp"
#include "portopt/quenched.hpp"
#include "portopt/rng.hpp"

namespace oracles {

/// Composite Simpson quadrature on [lo, hi].
inline double integrate(const std::function<double(double)>& f, double lo, double hi,
                        int intervals = 20000) {
  if (intervals % 2 != 0) ++intervals;
  const double h = (hi - lo) / intervals;
  double acc = f(lo) + f(hi);
  for (int i = 1; i < intervals; ++i) {
    acc += f(lo + i * h) * (i % 2 == 0 ? 2.0 : 4.0);
  }
  return acc * h / 3.0;
}

/// Bounded Pareto density, normalized by quadrature (not by the
/// library's closed form).
inline double pareto_density(const portopt::ParetoParams& p, double x) {
  const double norm = integrate(
      [&](double t) { return std::pow(t, -p.exponent); }, p.lower, p.upper);
  return std::pow(x, -p.exponent) / norm;
}

/// E[g(X)] for X bounded-Pareto, by quadrature.
inline double pareto_expectation(const portopt::ParetoParams& p,
                                 const std::function<double(double)>& g) {
  return integrate([&](double x) { return g(x) * pareto_density(p, x); }, p.lower, p.upper);
}

/// Upper quantile of chi-square with k dof (Wilson-Hilferty); good to a
/// few percent for k >= 10, plenty for test bands.
inline double chi_square_quantile(double k, double z) {
  const double a = 2.0 / (9.0 * k);
  const double c = 1.0 - a + z * std::sqrt(a);
  return k * c * c * c;
}

/// Everything computed through the explicit inverse of J; mirrors the
/// paper's Steps 3-6 literally.
struct InversePipeline {
  portopt::GMoments g;
  portopt::Multipliers m;
  Eigen::VectorXd weights;
  double eps = 0.0;

  InversePipeline(const portopt::WishartMatrix& wishart,
                  const portopt::AssetEnsemble& ensemble,
                  const portopt::ConstraintSpec& constraints) {
    const Eigen::MatrixXd inv = wishart.matrix().inverse();
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(wishart.dim());
    const Eigen::VectorXd& r = ensemble.mean_return;
    const double n = ensemble.total_assets;

    g.g0 = ones.dot(inv * ones) / n;
    g.g1 = r.dot(inv * ones) / n;
    g.g2 = r.dot(inv * r) / n;

    Eigen::Matrix2d gram;
    gram << g.g0, g.g1, g.g1, g.g2;
    const Eigen::Vector2d targets(constraints.budget(), constraints.excess_return());
    const Eigen::Vector2d multipliers = gram.fullPivLu().solve(targets);
    m.k = multipliers[0];
    m.theta = multipliers[1];
    weights = m.k * (inv * ones) + m.theta * (inv * r);
    eps = 0.5 * weights.dot(wishart.matrix() * weights) / (n - 1.0);
  }
};

/// Synthetic ensemble with uniform r and v draws; moment invariants
/// hold by construction.
inline portopt::AssetEnsemble random_ensemble(portopt::Rng& rng, int total_assets,
                                              double r_lo = 0.5, double r_hi = 2.5,
                                              double v_lo = 0.2, double v_hi = 2.0) {
  portopt::AssetEnsemble ensemble;
  ensemble.total_assets = total_assets;
  ensemble.risk_free_return = 1.0;
  ensemble.mean_return.resize(total_assets - 1);
  ensemble.variance.resize(total_assets - 1);
  for (int i = 0; i < total_assets - 1; ++i) {
    ensemble.mean_return[i] = r_lo + (r_hi - r_lo) * rng.uniform();
    ensemble.variance[i] = v_lo + (v_hi - v_lo) * rng.uniform();
  }
  return ensemble;
}

/// Random bracket moments with V1 bounded away from zero.
inline portopt::AsymptoticMoments random_moments(portopt::Rng& rng) {
  for (;;) {
    const portopt::AsymptoticMoments m =
        portopt::empirical_moments(random_ensemble(rng, 13));
    if (m.v1() > 1e-4) return m;
  }
}

}  // namespace oracles
