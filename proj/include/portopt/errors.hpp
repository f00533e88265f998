#pragma once

#include <stdexcept>
#include <string>

namespace portopt {

/// Base class for all portopt errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A parameter violates its mathematical domain (e.g. Pareto bounds,
/// alpha <= 1, nonpositive risk).
struct ParamDomainError : Error {
  using Error::Error;
};

/// Malformed or inconsistent configuration / input files.
struct ConfigError : Error {
  using Error::Error;
};

/// A matrix that must be positive definite failed to factorize.
struct SingularMatrixError : Error {
  using Error::Error;
};

/// Budget and expected-return constraints are collinear (V1 ~ 0); the
/// 2x2 multiplier system is singular.
struct DegenerateConstraintsError : Error {
  using Error::Error;
};

/// The risk budget of the dual problem is below the minimum-variance
/// risk (negative radicand).
struct InfeasibleRiskBudgetError : Error {
  using Error::Error;
};

/// No tangency portfolio exists (risky assets do not beat the
/// risk-free return on average).
struct NoTangencyError : Error {
  using Error::Error;
};

/// Experiment-level failure (e.g. too many failed trials).
struct ExperimentError : Error {
  using Error::Error;
};

/// File I/O failure; message names the offending path.
struct IoError : Error {
  using Error::Error;
};

}  // namespace portopt
