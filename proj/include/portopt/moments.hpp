#pragma once

namespace portopt {

/// Inverse-variance weighted averages over the risky assets. The same
/// struct carries either true-distribution moments or the empirical
/// averages of a finite ensemble; every analytic formula accepts both.
struct AsymptoticMoments {
  double vinv = 0.0;      // <v^-1>
  double vinv_r = 0.0;    // <v^-1 r>
  double vinv_r2 = 0.0;   // <v^-1 r^2>
  double vinv2 = 0.0;     // <v^-2>
  double vinv2_r = 0.0;   // <v^-2 r>
  double vinv2_r2 = 0.0;  // <v^-2 r^2>
  double log_v = 0.0;     // <log v>

  /// v^-1-weighted mean return R1.
  double r1() const { return vinv_r / vinv; }
  /// v^-1-weighted return variance V1.
  double v1() const { return vinv_r2 / vinv - r1() * r1(); }
  /// v^-2-weighted mean return R2.
  double r2() const { return vinv2_r / vinv2; }
  /// v^-2-weighted return variance V2.
  double v2() const { return vinv2_r2 / vinv2 - r2() * r2(); }
  /// R_rho = rho R0 + (1 - rho) R1.
  double blended_return(double rho, double risk_free_return) const {
    return rho * risk_free_return + (1.0 - rho) * r1();
  }
};

/// Quadratic-form moments g(0), g(1), g(2) of a positive definite
/// matrix against the all-ones and mean-return vectors (1/N scaling).
struct GMoments {
  double g0 = 0.0;  // e^T J^-1 e / N
  double g1 = 0.0;  // r^T J^-1 e / N
  double g2 = 0.0;  // r^T J^-1 r / N

  /// g-based analogue of R1.
  double weighted_mean() const { return g1 / g0; }
  /// g-based analogue of V1 (Eq. form g2/g0 - (g1/g0)^2).
  double weighted_variance() const {
    const double mean = weighted_mean();
    return g2 / g0 - mean * mean;
  }
};

}  // namespace portopt
