#pragma once

// Bit-stable output: diagnostics CSV, coefficient snapshots and run summaries.
// Every floating point value is written with 17 significant digits.

#include <iosfwd>
#include <string>
#include <vector>

#include "centroflow/config.hpp"
#include "centroflow/flow.hpp"

namespace centroflow {

/// %.17g
std::string format_exact(double value);

/// t, dt, V, omega_p, ratio, deficit, s_min, s_max, r_minus, r_plus, K_min,
/// K_max, kappa_min, kappa_max, dist_ball, odd_energy, tail_energy, sl_applied
const std::vector<std::string>& csv_columns();
void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, const DiagnosticsRecord& record);
void write_csv(std::ostream& out, const std::vector<DiagnosticsRecord>& records);

/// Empty when the record satisfies the diagnostics invariants (curvatures
/// positive and finite, deficit >= -1e-8), otherwise a description.
std::string record_violation(const DiagnosticsRecord& record);

/// Coefficient file: {"dimension", "lmax", "t", "map" (row-major, may be
/// empty), "coefficients": [[degree, order, value], ...]}.
struct CoefficientFile {
  double t = 0.0;
  Spectrum support;
  std::vector<double> map;
};
void write_coefficients(std::ostream& out, const CoefficientFile& file);
void write_coefficients(std::ostream& out, const Snapshot& snapshot);
/// Throws ConfigError on malformed input.
CoefficientFile read_coefficients(std::istream& in);

/// JSON summary of a finished run. Contains no timestamps or paths that
/// vary between identical invocations.
void write_summary(std::ostream& out, const RunConfig& config, const RunResult& result);

}  // namespace centroflow
