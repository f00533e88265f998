#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace portopt {

struct CheckResult {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Runs one of the built-in invariant suites: "identities" (Pythagoras,
/// opportunity loss, order-parameter risk, cumulant derivatives),
/// "duality" (primal-dual round trips), "tobin" (separation geometry)
/// or "oracle" (explicit-inverse equivalence). Throws ConfigError for
/// an unknown suite name.
std::vector<CheckResult> run_check_suite(const std::string& suite, std::uint64_t seed);

std::vector<std::string> check_suite_names();

}  // namespace portopt
