#include "portopt/checks.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "portopt/annealed.hpp"
#include "portopt/errors.hpp"
#include "portopt/market.hpp"
#include "portopt/moments.hpp"
#include "portopt/quenched.hpp"
#include "portopt/replica.hpp"
#include "portopt/rng.hpp"

namespace portopt {

namespace {

double uniform_in(Rng& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

AssetEnsemble random_ensemble(Rng& rng, int total_assets, double r_lo = 0.5,
                              double r_hi = 2.5, double v_lo = 0.2, double v_hi = 2.0) {
  AssetEnsemble ensemble;
  ensemble.total_assets = total_assets;
  ensemble.risk_free_return = 1.0;
  ensemble.mean_return.resize(total_assets - 1);
  ensemble.variance.resize(total_assets - 1);
  for (int i = 0; i < total_assets - 1; ++i) {
    ensemble.mean_return[i] = uniform_in(rng, r_lo, r_hi);
    ensemble.variance[i] = uniform_in(rng, v_lo, v_hi);
  }
  return ensemble;
}

// Random bracket moments with guaranteed V1 > 0; realized as the
// empirical averages of a small synthetic ensemble so all moment
// invariants hold by construction.
AsymptoticMoments random_moments(Rng& rng) {
  for (;;) {
    const AssetEnsemble ensemble = random_ensemble(rng, 13);
    const AsymptoticMoments m = empirical_moments(ensemble);
    if (m.v1() > 1e-4) return m;
  }
}

AsymptoticMoments random_moments_r1_above(Rng& rng, double risk_free_return) {
  for (;;) {
    const AsymptoticMoments m = random_moments(rng);
    if (m.r1() > risk_free_return + 0.05) return m;
  }
}

struct ResidualTracker {
  double worst = 0.0;
  void fold(double value) { worst = std::max(worst, std::abs(value)); }
};

CheckResult make_result(std::string name, double residual, double tolerance) {
  return CheckResult{std::move(name), residual, tolerance, residual <= tolerance};
}

// Reference pipeline through the explicit inverse.
struct InverseReference {
  GMoments g;
  Multipliers m;
  Eigen::VectorXd weights;
  double eps = 0.0;
};

InverseReference inverse_pipeline(const WishartMatrix& wishart, const AssetEnsemble& ensemble,
                                  const ConstraintSpec& constraints) {
  const Eigen::MatrixXd inv = wishart.matrix().inverse();
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(wishart.dim());
  const Eigen::VectorXd& r = ensemble.mean_return;
  const double n = ensemble.total_assets;

  InverseReference ref;
  ref.g.g0 = ones.dot(inv * ones) / n;
  ref.g.g1 = r.dot(inv * ones) / n;
  ref.g.g2 = r.dot(inv * r) / n;

  Eigen::Matrix2d gram;
  gram << ref.g.g0, ref.g.g1, ref.g.g1, ref.g.g2;
  Eigen::Vector2d targets(constraints.budget(), constraints.excess_return());
  const Eigen::Vector2d multipliers = gram.fullPivLu().solve(targets);
  ref.m.k = multipliers[0];
  ref.m.theta = multipliers[1];
  ref.weights = ref.m.k * (inv * ones) + ref.m.theta * (inv * r);
  ref.eps = 0.5 * ref.weights.dot(wishart.matrix() * ref.weights) / (n - 1.0);
  return ref;
}

std::vector<CheckResult> identities_suite(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<CheckResult> out;

  {
    ResidualTracker t;
    for (int i = 0; i < 1000; ++i) {
      const AsymptoticMoments m = random_moments_r1_above(rng, 1.0);
      const double alpha = uniform_in(rng, 1.1, 10.0);
      const double rho = uniform_in(rng, -0.5, 0.9);
      const SharpeAnalysis s = sharpe_analysis(m, alpha, rho, 1.0);
      t.fold(s.s2_star - (s.s2_min + s.s2_max));
    }
    out.push_back(make_result("sharpe_pythagoras", t.worst, 1e-12));
  }

  {
    ResidualTracker t;
    for (int i = 0; i < 1000; ++i) {
      const AsymptoticMoments m = random_moments(rng);
      const double alpha = uniform_in(rng, 1.1, 10.0);
      const ConstraintSpec c{uniform_in(rng, -1.0, 2.0), uniform_in(rng, 0.2, 3.0),
                             uniform_in(rng, 0.2, 2.0)};
      const double eps = epsilon_quenched(m, alpha, c);
      if (!(eps > 0.0)) continue;
      const double kappa = annealed_min_risk(m, c, alpha) / eps;
      t.fold(kappa * (alpha - 1.0) / alpha - 1.0);
    }
    out.push_back(make_result("opportunity_loss_ratio", t.worst, 1e-12));
  }

  {
    ResidualTracker t_eps;
    ResidualTracker t_mult;
    for (int i = 0; i < 200; ++i) {
      const AsymptoticMoments m = random_moments(rng);
      const double alpha = uniform_in(rng, 1.2, 8.0);
      const ConstraintSpec c{uniform_in(rng, -0.5, 0.9), uniform_in(rng, 0.5, 2.5), 1.0};
      const double beta = uniform_in(rng, 0.5, 50.0);
      const OrderParameters op = replica_order_parameters(m, alpha, c, beta);
      const double eps = epsilon_quenched(m, alpha, c);
      t_eps.fold(free_energy_risk_limit(op, alpha) / eps - 1.0);
      const Multipliers mult = lagrange_multipliers(asymptotic_gmoments(m, alpha), c);
      const double scale = std::max({1.0, std::abs(mult.k), std::abs(mult.theta)});
      t_mult.fold((op.k / beta - mult.k) / scale);
      t_mult.fold((op.theta / beta - mult.theta) / scale);
    }
    out.push_back(make_result("order_parameter_risk_limit", t_eps.worst, 1e-12));
    out.push_back(make_result("order_parameter_multipliers", t_mult.worst, 1e-12));
  }

  {
    ResidualTracker t;
    const double h = 1e-4;
    for (int i = 0; i < 100; ++i) {
      const AsymptoticMoments m = random_moments(rng);
      const double alpha = uniform_in(rng, 1.1, 10.0);
      const GMoments g = asymptotic_gmoments(m, alpha);
      auto phi = [&](double k, double theta) { return cumulant_phi(m, alpha, k, theta); };
      const double d_kk = (phi(h, 0.0) - 2.0 * phi(0.0, 0.0) + phi(-h, 0.0)) / (h * h);
      const double d_tt = (phi(0.0, h) - 2.0 * phi(0.0, 0.0) + phi(0.0, -h)) / (h * h);
      const double d_kt =
          (phi(h, h) - phi(h, -h) - phi(-h, h) + phi(-h, -h)) / (4.0 * h * h);
      t.fold((d_kk - g.g0) / g.g0);
      t.fold((d_kt - g.g1) / g.g1);
      t.fold((d_tt - g.g2) / g.g2);
    }
    out.push_back(make_result("cumulant_second_differences", t.worst, 1e-6));
  }

  {
    ResidualTracker t;
    const double h = 1e-6;
    for (int i = 0; i < 100; ++i) {
      const AsymptoticMoments m = random_moments(rng);
      const double alpha = uniform_in(rng, 1.2, 8.0);
      const double r0 = 1.0;
      const double target = uniform_in(rng, 0.5, 2.5);
      const double rs = rho_star(m, target, r0).value;
      auto eps_at = [&](double rho) {
        return epsilon_quenched(m, alpha, ConstraintSpec{rho, target, r0});
      };
      const double derivative = (eps_at(rs + h) - eps_at(rs - h)) / (2.0 * h);
      t.fold(derivative / std::max(1.0, eps_at(rs)));
    }
    out.push_back(make_result("rho_star_stationarity", t.worst, 1e-6));
  }

  {
    // Eq.-42 Sharpe evaluated at (rho*(R), R) through eps_min is the
    // same number for every R > R0.
    ResidualTracker t;
    for (int i = 0; i < 100; ++i) {
      const AsymptoticMoments m = random_moments_r1_above(rng, 1.0);
      const double alpha = uniform_in(rng, 1.2, 8.0);
      const double r0 = 1.0;
      auto cal_sharpe = [&](double target) {
        const double rho = rho_star(m, target, r0).value;
        const double eps = epsilon_min(m, alpha, target, r0);
        return sharpe_ratio(eps, ConstraintSpec{rho, target, r0});
      };
      const double reference = cal_sharpe(r0 + 0.3);
      for (double target = r0 + 0.1; target <= r0 + 1.0; target += 0.1) {
        t.fold((cal_sharpe(target) - reference) / std::max(1.0, std::abs(reference)));
      }
    }
    out.push_back(make_result("cal_sharpe_constant", t.worst, 1e-12));
  }

  return out;
}

std::vector<CheckResult> duality_suite(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<CheckResult> out;

  ResidualTracker round_trip;
  ResidualTracker risk_budget;
  ResidualTracker boundary;
  for (int i = 0; i < 100; ++i) {
    const int n = 8 + static_cast<int>(rng.next_u64() % 17);
    const AssetEnsemble ensemble = random_ensemble(rng, n);
    const ReturnMatrix returns = sample_return_matrix(
        ensemble, 3 * n, ReturnDistribution::gaussian, rng.next_u64());
    const WishartMatrix j = wishart(returns);
    const QuenchedSolver solver(j, ensemble);

    const double rho = uniform_in(rng, -0.5, 0.9);
    const double r_min =
        rho * ensemble.risk_free_return + (1.0 - rho) * solver.gmoments().weighted_mean();
    const double target = r_min + uniform_in(rng, 0.05, 1.0);
    const ConstraintSpec c{rho, target, ensemble.risk_free_return};

    const double eps = solver.minimal_risk(c);
    const DualSolution d = solver.dual_max_return(rho, eps);
    round_trip.fold((d.max_return - target) / std::max(1.0, std::abs(target)));

    const double realized =
        0.5 * d.weights.dot(j.matrix() * d.weights) / (ensemble.total_assets - 1.0);
    risk_budget.fold(realized / eps - 1.0);

    // minimum-variance budget: zero square-root term
    const double eps_mv = solver.minimal_risk(ConstraintSpec{rho, r_min, c.risk_free_return});
    const DualSolution mv = solver.dual_max_return(rho, eps_mv);
    boundary.fold((mv.max_return - r_min) / std::max(1.0, std::abs(r_min)));
  }
  out.push_back(make_result("finite_round_trip", round_trip.worst, 1e-8));
  out.push_back(make_result("dual_risk_budget", risk_budget.worst, 1e-8));
  out.push_back(make_result("dual_min_variance_boundary", boundary.worst, 1e-10));

  {
    ResidualTracker t;
    ResidualTracker monotone;
    for (int i = 0; i < 100; ++i) {
      const AsymptoticMoments m = random_moments(rng);
      const double alpha = uniform_in(rng, 1.2, 8.0);
      const double rho = uniform_in(rng, -0.5, 0.9);
      const double r0 = 1.0;
      const double r_min = rho * r0 + (1.0 - rho) * m.r1();
      const double target = r_min + uniform_in(rng, 0.05, 1.0);
      const double eps = epsilon_quenched(m, alpha, ConstraintSpec{rho, target, r0});
      const double recovered = dual_max_return_asymptotic(m, alpha, rho, r0, eps);
      t.fold((recovered - target) / std::max(1.0, std::abs(target)));
      const double more = dual_max_return_asymptotic(m, alpha, rho, r0, eps * 1.5);
      monotone.fold(std::min(0.0, more - recovered));
    }
    out.push_back(make_result("asymptotic_round_trip", t.worst, 1e-12));
    out.push_back(make_result("return_monotone_in_risk", monotone.worst, 0.0));
  }

  return out;
}

std::vector<CheckResult> tobin_suite(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<CheckResult> out;

  const AssetEnsemble ensemble = random_ensemble(rng, 100, 1.1, 2.5, 0.3, 2.0);
  const ReturnMatrix returns =
      sample_return_matrix(ensemble, 300, ReturnDistribution::gaussian, rng.next_u64());
  const WishartMatrix j = wishart(returns);
  const QuenchedSolver solver(j, ensemble);

  {
    ResidualTracker t;
    const double targets[] = {1.2, 1.5, 1.8};
    Eigen::VectorXd reference;
    for (double target : targets) {
      Eigen::VectorXd w = solver.market_portfolio(target, ensemble.risk_free_return);
      w /= w.norm();
      if (reference.size() == 0) {
        reference = w;
      } else {
        t.fold((w - reference).cwiseAbs().maxCoeff());
      }
    }
    out.push_back(make_result("market_direction_invariance", t.worst, 1e-10));
  }

  {
    ResidualTracker t;
    const double targets[] = {1.2, 1.5, 1.8};
    for (double target : targets) {
      const double rho = solver.rho_star(target, ensemble.risk_free_return);
      const Eigen::VectorXd via_solve =
          solver.market_portfolio(target, ensemble.risk_free_return);
      const Eigen::VectorXd via_multipliers =
          solver.market_portfolio(target, ensemble.risk_free_return, rho);
      t.fold((via_solve - via_multipliers).cwiseAbs().maxCoeff() /
             std::max(1.0, via_solve.cwiseAbs().maxCoeff()));
    }
    out.push_back(make_result("market_equals_optimal_at_rho_star", t.worst, 1e-10));
  }

  {
    ResidualTracker cal;
    ResidualTracker tangency;
    ResidualTracker equality_point;
    for (int i = 0; i < 100; ++i) {
      const AsymptoticMoments m = random_moments_r1_above(rng, 1.0);
      const double alpha = uniform_in(rng, 1.2, 8.0);
      const double r0 = 1.0;
      const TobinTangent tangent = tobin_tangent(m, alpha, r0);
      for (double target = r0; target <= r0 + 1.0; target += 0.05) {
        const double cal_y = tangent.cal_slope * (target - r0);
        const double frontier = std::sqrt(2.0 * epsilon_min(m, alpha, target, r0));
        cal.fold((cal_y - frontier) / std::max(1.0, frontier));
      }
      const double at_tangent = tangent.cal_slope * (tangent.market_return - r0);
      tangency.fold((at_tangent - tangent.market_sigma) /
                    std::max(1.0, tangent.market_sigma));
      const double y0 =
          std::sqrt(2.0 * epsilon_no_riskfree(m, alpha, tangent.market_return));
      tangency.fold((y0 - tangent.market_sigma) / std::max(1.0, tangent.market_sigma));
      const double gap = epsilon_no_riskfree(m, alpha, tangent.market_return) -
                         epsilon_min(m, alpha, tangent.market_return, r0);
      equality_point.fold(gap);
    }
    out.push_back(make_result("cal_matches_sqrt_2eps_min", cal.worst, 1e-12));
    out.push_back(make_result("tangency_point", tangency.worst, 1e-12));
    out.push_back(make_result("eps0_eps_min_equality_at_market", equality_point.worst, 1e-12));
  }

  return out;
}

std::vector<CheckResult> oracle_suite(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<CheckResult> out;

  ResidualTracker g_res;
  ResidualTracker mult_res;
  ResidualTracker w_res;
  ResidualTracker eps_res;
  for (int i = 0; i < 50; ++i) {
    const AssetEnsemble ensemble = random_ensemble(rng, 10);
    const ReturnMatrix returns =
        sample_return_matrix(ensemble, 30, ReturnDistribution::gaussian, rng.next_u64());
    const WishartMatrix j = wishart(returns);
    const QuenchedSolver solver(j, ensemble);
    const ConstraintSpec c{uniform_in(rng, -0.5, 0.9), uniform_in(rng, 0.8, 2.2), 1.0};
    const InverseReference ref = inverse_pipeline(j, ensemble, c);

    const GMoments& g = solver.gmoments();
    g_res.fold(g.g0 / ref.g.g0 - 1.0);
    g_res.fold(g.g1 / ref.g.g1 - 1.0);
    g_res.fold(g.g2 / ref.g.g2 - 1.0);

    const Multipliers m = solver.multipliers(c);
    const double mult_scale = std::max({1.0, std::abs(ref.m.k), std::abs(ref.m.theta)});
    mult_res.fold((m.k - ref.m.k) / mult_scale);
    mult_res.fold((m.theta - ref.m.theta) / mult_scale);

    const Eigen::VectorXd w = solver.portfolio(m);
    w_res.fold((w - ref.weights).cwiseAbs().maxCoeff() /
               std::max(1.0, ref.weights.cwiseAbs().maxCoeff()));

    eps_res.fold(solver.minimal_risk(c) / ref.eps - 1.0);
  }
  out.push_back(make_result("gmoments_vs_inverse", g_res.worst, 1e-8));
  out.push_back(make_result("multipliers_vs_inverse", mult_res.worst, 1e-8));
  out.push_back(make_result("weights_vs_inverse", w_res.worst, 1e-8));
  out.push_back(make_result("risk_vs_inverse", eps_res.worst, 1e-8));
  return out;
}

}  // namespace

std::vector<std::string> check_suite_names() {
  return {"identities", "duality", "tobin", "oracle"};
}

std::vector<CheckResult> run_check_suite(const std::string& suite, std::uint64_t seed) {
  if (suite == "identities") return identities_suite(seed);
  if (suite == "duality") return duality_suite(seed);
  if (suite == "tobin") return tobin_suite(seed);
  if (suite == "oracle") return oracle_suite(seed);
  throw ConfigError("unknown check suite: " + suite);
}

}  // namespace portopt
