#include "portopt/market.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "portopt/errors.hpp"
#include "portopt/rng.hpp"

namespace portopt {

namespace {

// %.17g round-trips doubles exactly.
std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

void ParetoParams::validate() const {
  if (!(lower > 0.0) || !(upper > lower)) {
    std::ostringstream msg;
    msg << "bounded Pareto requires 0 < lower < upper, got [" << lower << ", " << upper
        << "]";
    throw ParamDomainError(msg.str());
  }
  if (!(exponent > 0.0)) {
    std::ostringstream msg;
    msg << "bounded Pareto exponent must be positive, got " << exponent;
    throw ParamDomainError(msg.str());
  }
}

std::vector<double> sample_bounded_pareto(const ParetoParams& params, int count,
                                          std::uint64_t seed) {
  params.validate();
  if (count < 1) throw ParamDomainError("sample count must be >= 1");

  const double l = params.lower;
  const double u = params.upper;
  const double c = params.exponent;

  std::vector<double> draws(static_cast<std::size_t>(count));
  Rng rng(seed);
  if (c == 1.0) {
    // F(x) = log(x/l)/log(u/l)  =>  x = l (u/l)^U
    const double ratio = u / l;
    for (double& x : draws) x = l * std::pow(ratio, rng.uniform());
  } else {
    // F(x) = (x^{1-c} - l^{1-c})/(u^{1-c} - l^{1-c})
    const double lp = std::pow(l, 1.0 - c);
    const double up = std::pow(u, 1.0 - c);
    const double inv = 1.0 / (1.0 - c);
    for (double& x : draws) x = std::pow(lp + rng.uniform() * (up - lp), inv);
  }
  return draws;
}

namespace {

// Normalization A with density A x^-c on [l, u].
double pareto_norm(const ParetoParams& p) {
  if (p.exponent == 1.0) return 1.0 / std::log(p.upper / p.lower);
  return (1.0 - p.exponent) /
         (std::pow(p.upper, 1.0 - p.exponent) - std::pow(p.lower, 1.0 - p.exponent));
}

}  // namespace

double pareto_power_moment(const ParetoParams& params, int k) {
  params.validate();
  const double a = pareto_norm(params);
  const double expo = static_cast<double>(k) + 1.0 - params.exponent;
  if (expo == 0.0) return a * std::log(params.upper / params.lower);
  return a * (std::pow(params.upper, expo) - std::pow(params.lower, expo)) / expo;
}

double pareto_log_moment(const ParetoParams& params) {
  params.validate();
  const double a = pareto_norm(params);
  const double l = params.lower;
  const double u = params.upper;
  const double c = params.exponent;
  if (c == 1.0) {
    const double lu = std::log(u);
    const double ll = std::log(l);
    return a * 0.5 * (lu * lu - ll * ll);
  }
  // integral of x^-c log x: x^{1-c} ((1-c) log x - 1) / (1-c)^2
  const double s = 1.0 - c;
  auto antiderivative = [&](double x) {
    return std::pow(x, s) * (s * std::log(x) - 1.0) / (s * s);
  };
  return a * (antiderivative(u) - antiderivative(l));
}

double pareto_cdf(const ParetoParams& params, double x) {
  if (x <= params.lower) return 0.0;
  if (x >= params.upper) return 1.0;
  const double c = params.exponent;
  if (c == 1.0) return std::log(x / params.lower) / std::log(params.upper / params.lower);
  const double lp = std::pow(params.lower, 1.0 - c);
  const double up = std::pow(params.upper, 1.0 - c);
  return (std::pow(x, 1.0 - c) - lp) / (up - lp);
}

void AssetEnsemble::validate() const {
  if (total_assets < 3) throw ParamDomainError("market needs at least 3 assets");
  const auto n = static_cast<Eigen::Index>(total_assets - 1);
  if (mean_return.size() != n || variance.size() != n) {
    throw ParamDomainError("ensemble vectors must have length N-1");
  }
  if (!(variance.minCoeff() > 0.0)) {
    throw ParamDomainError("all risky-asset variances must be positive");
  }
}

AssetEnsemble build_ensemble(const ParetoParams& pareto_r, const ParetoParams& pareto_h,
                             int total_assets, double risk_free_return,
                             std::uint64_t seed) {
  if (total_assets < 3) throw ParamDomainError("market needs at least 3 assets");
  const int risky = total_assets - 1;
  const auto r = sample_bounded_pareto(pareto_r, risky, derive_stream(seed, 0));
  const auto h = sample_bounded_pareto(pareto_h, risky, derive_stream(seed, 1));

  AssetEnsemble ensemble;
  ensemble.total_assets = total_assets;
  ensemble.risk_free_return = risk_free_return;
  ensemble.mean_return.resize(risky);
  ensemble.variance.resize(risky);
  for (int i = 0; i < risky; ++i) {
    ensemble.mean_return[i] = r[static_cast<std::size_t>(i)];
    ensemble.variance[i] = h[static_cast<std::size_t>(i)] * r[static_cast<std::size_t>(i)] *
                           r[static_cast<std::size_t>(i)];
  }
  ensemble.validate();
  return ensemble;
}

ReturnDistribution parse_return_distribution(std::string_view name) {
  if (name == "gaussian") return ReturnDistribution::gaussian;
  if (name == "shifted_uniform") return ReturnDistribution::shifted_uniform;
  throw ConfigError("unknown return distribution: " + std::string(name));
}

std::string_view to_string(ReturnDistribution dist) {
  switch (dist) {
    case ReturnDistribution::gaussian: return "gaussian";
    case ReturnDistribution::shifted_uniform: return "shifted_uniform";
  }
  return "?";
}

ReturnMatrix sample_return_matrix(const AssetEnsemble& ensemble, int periods,
                                  ReturnDistribution dist, std::uint64_t seed) {
  ensemble.validate();
  if (periods < 1) throw ParamDomainError("period count must be >= 1");

  const int risky = ensemble.risky_count();
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(ensemble.total_assets));

  ReturnMatrix returns;
  returns.total_assets = ensemble.total_assets;
  returns.periods = periods;
  returns.scaled.resize(risky, periods);

  Rng rng(seed);
  for (int i = 0; i < risky; ++i) {
    // centered draw = xbar - r_i, variance v_i
    const double scale = (dist == ReturnDistribution::gaussian)
                             ? std::sqrt(ensemble.variance[i])
                             : std::sqrt(12.0 * ensemble.variance[i]);
    for (int mu = 0; mu < periods; ++mu) {
      const double centered = (dist == ReturnDistribution::gaussian)
                                  ? scale * rng.normal()
                                  : scale * (rng.uniform() - 0.5);
      returns.scaled(i, mu) = centered * inv_sqrt_n;
    }
  }
  return returns;
}

WishartMatrix::WishartMatrix(Eigen::MatrixXd j, int total_assets)
    : j_(std::move(j)), total_assets_(total_assets) {
  if (j_.rows() != j_.cols()) throw SingularMatrixError("Wishart matrix must be square");
  llt_.compute(j_);
  if (llt_.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "Wishart matrix of dimension " << j_.rows() << " is not positive definite";
    throw SingularMatrixError(msg.str());
  }
}

WishartMatrix wishart(const ReturnMatrix& returns) {
  const Eigen::Index n = returns.scaled.rows();
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
  // rank update writes one triangle; mirroring it keeps J exactly symmetric
  j.selfadjointView<Eigen::Lower>().rankUpdate(returns.scaled);
  j.triangularView<Eigen::StrictlyUpper>() = j.transpose();
  try {
    return WishartMatrix(std::move(j), returns.total_assets);
  } catch (const SingularMatrixError&) {
    std::ostringstream msg;
    msg << "singular Wishart matrix: " << n << "x" << n << " from " << returns.periods
        << " periods (need p >= N-1 and returns in general position)";
    throw SingularMatrixError(msg.str());
  }
}

AsymptoticMoments empirical_moments(const AssetEnsemble& ensemble) {
  ensemble.validate();
  AsymptoticMoments m;
  const int risky = ensemble.risky_count();
  for (int i = 0; i < risky; ++i) {
    const double r = ensemble.mean_return[i];
    const double vi = 1.0 / ensemble.variance[i];
    m.vinv += vi;
    m.vinv_r += vi * r;
    m.vinv_r2 += vi * r * r;
    m.vinv2 += vi * vi;
    m.vinv2_r += vi * vi * r;
    m.vinv2_r2 += vi * vi * r * r;
    m.log_v += std::log(ensemble.variance[i]);
  }
  const double inv_count = 1.0 / risky;
  m.vinv *= inv_count;
  m.vinv_r *= inv_count;
  m.vinv_r2 *= inv_count;
  m.vinv2 *= inv_count;
  m.vinv2_r *= inv_count;
  m.vinv2_r2 *= inv_count;
  m.log_v *= inv_count;
  return m;
}

AsymptoticMoments true_moments(const ParetoParams& pareto_r, const ParetoParams& pareto_h) {
  // v = h r^2 with r, h independent, so every <v^-a r^b> factorizes.
  const double h1 = pareto_power_moment(pareto_h, -1);
  const double h2 = pareto_power_moment(pareto_h, -2);
  AsymptoticMoments m;
  m.vinv = h1 * pareto_power_moment(pareto_r, -2);
  m.vinv_r = h1 * pareto_power_moment(pareto_r, -1);
  m.vinv_r2 = h1;
  m.vinv2 = h2 * pareto_power_moment(pareto_r, -4);
  m.vinv2_r = h2 * pareto_power_moment(pareto_r, -3);
  m.vinv2_r2 = h2 * pareto_power_moment(pareto_r, -2);
  m.log_v = pareto_log_moment(pareto_h) + 2.0 * pareto_log_moment(pareto_r);
  return m;
}

void write_ensemble_csv(const AssetEnsemble& ensemble, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << "index,r,v\n";
  for (int i = 0; i < ensemble.risky_count(); ++i) {
    out << i << ',' << fmt_double(ensemble.mean_return[i]) << ','
        << fmt_double(ensemble.variance[i]) << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

void write_return_matrix_csv(const ReturnMatrix& returns, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << "index";
  for (int mu = 0; mu < returns.periods; ++mu) out << ",x" << mu;
  out << '\n';
  for (Eigen::Index i = 0; i < returns.scaled.rows(); ++i) {
    out << i;
    for (Eigen::Index mu = 0; mu < returns.scaled.cols(); ++mu) {
      out << ',' << fmt_double(returns.scaled(i, mu));
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace portopt
