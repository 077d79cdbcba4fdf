#pragma once

// Theorem-level checks run by `centroflow verify` and the acceptance binary.

#include <string>
#include <vector>

namespace centroflow {

struct VerifyOptions {
  bool quick = false;            // fewer bodies and cases, for smoke tests
  bool invert_rhs_sign = false;  // mutation hook: every flow runs with the sign of the RHS flipped
};

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

/// ball, ellipsoid, monotonicity, convergence, duality, scaling, curvature, geometry
const std::vector<std::string>& suite_names();

/// Runs one suite. Throws InvalidArgument for an unknown name.
CheckResult run_suite(const std::string& name, const VerifyOptions& options = {});

/// Runs every suite in suite_names() order; the random-body runs behind
/// monotonicity, convergence and curvature are computed once.
std::vector<CheckResult> run_all_suites(const VerifyOptions& options = {});

}  // namespace centroflow
