#pragma once

// Time integration of the p-centro-affine flow d/dt s = -s K0^beta and of the
// expanding flow of the polar body, with optional volume and SL(n+1)
// normalization.

#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "centroflow/geometry.hpp"
#include "centroflow/sphere.hpp"

namespace centroflow {

enum class FlowDirection {
  contracting,  // d/dt s = -s K0^beta
  expanding,    // d/dt s = +s K0^(-beta), the flow of the polar body
};

struct FlowConfig {
  int dimension = 1;
  double p = 1.0;
  int lmax = 32;
  std::vector<int> resolution;  // empty: dealiased grid for lmax
  double dt_safety = 0.5;       // in (0, 1]
  double fixed_dt = 0.0;        // > 0 replaces the adaptive step
  long max_steps = 100000;
  double horizon = std::numeric_limits<double>::infinity();
  bool normalize_volume = true;
  int sl_every = 0;             // steps between SL normalizations, 0 = only when s_max/s_min > 10
  double sl_ratio_trigger = 10.0;
  double sl_contact_tolerance = 1e-9;
  double convexity_floor = 1e-8;
  double stop_deficit = 1e-8;   // stop once deficit < stop_deficit; 0 disables
  double stop_volume = 0.0;     // stop once V < stop_volume * omega; 0 disables
  int snapshot_every = 0;       // 0 = initial and final only
  std::uint64_t seed = 0;
  FlowDirection direction = FlowDirection::contracting;
  bool invert_rhs_sign = false;  // test hook: flips the sign of the right-hand side

  /// Throws ConfigError on out-of-range values.
  void validate() const;
  /// Human readable warnings, e.g. p outside [1, (n+1)/(n-1)) for n = 2.
  std::vector<std::string> warnings() const;
  bool outside_theorem_range() const { return dimension == 2 && p >= 3.0; }
};

/// Transform on the configured grid.
std::shared_ptr<const SphericalTransform> make_transform(const FlowConfig& config);

/// One point on a trajectory. Build with make_state so the cached curvature
/// data always matches the coefficients.
struct FlowState {
  double time = 0.0;
  Spectrum support;
  CurvatureBundle bundle;
  BodyMetrics metrics;
  double last_dt = 0.0;
  double odd_drift = 0.0;  // odd-degree energy of the last step before projection
  long accepted = 0;
  long rejected = 0;
};

/// Throws InvalidArgument when s <= 0 somewhere and ConvexityViolation when
/// the body is not strictly convex.
FlowState make_state(const SphericalTransform& transform, Spectrum support, double p, double time = 0.0,
                     double convexity_floor = 1e-8);

/// -s K0^{p/(n+1+p)} at the grid nodes.
ScalarField p_flow_rhs(const CurvatureBundle& bundle, double p);
ScalarField p_flow_rhs(const SphericalTransform& transform, const Spectrum& support, double p);

/// Adaptive step: safety * min(2.5 / (D_max L(L+n-1)), 0.1 s_min / |F|_max)
/// with D = beta |F| / lambda_min the largest diffusion coefficient of the
/// linearized operator.
double stable_dt(const SphericalTransform& transform, const FlowState& state, const FlowConfig& config);

/// One classical RK4 step on the coefficients, capped at dt_cap. Rejected
/// trials (convexity lost at any stage, spectral tail blowup) halve dt;
/// throws StepFailure after 20 consecutive rejections.
FlowState step(const SphericalTransform& transform, const FlowState& state, const FlowConfig& config,
               double dt_cap = std::numeric_limits<double>::infinity());

/// s <- (omega / V)^{1/(n+1)} s.
FlowState volume_normalize(const SphericalTransform& transform, const FlowState& state, double p,
                           double convexity_floor = 1e-8);

/// Scalars reported per accepted step.
struct DiagnosticsRecord {
  double t = 0.0;
  double dt = 0.0;
  double volume = 0.0;
  double omega_p = 0.0;
  double ratio = 0.0;
  double ratio_pre_sl = 0.0;  // ratio before the SL normalization of this step
  double deficit = 0.0;
  double s_min = 0.0;
  double s_max = 0.0;
  double r_minus = 0.0;
  double r_plus = 0.0;
  double gauss_min = 0.0;
  double gauss_max = 0.0;
  double kappa_min = 0.0;
  double kappa_max = 0.0;
  double mean_min = 0.0;
  double mean_max = 0.0;
  double dist_ball = 0.0;
  double odd_energy = 0.0;
  double tail_energy = 0.0;
  bool sl_applied = false;
};

DiagnosticsRecord diagnostics(const SphericalTransform& transform, const FlowState& state);

struct Snapshot {
  double t = 0.0;
  Spectrum support;
  Eigen::MatrixXd map;  // product of the SL maps applied so far: support = s_{map(K_t)} up to volume
};

struct TimeSeries {
  std::vector<DiagnosticsRecord> records;
  std::vector<Snapshot> snapshots;
};

enum class RunStatus { converged, volume_floor, horizon, step_budget, step_failure };
const char* to_string(RunStatus status);

struct RunResult {
  TimeSeries series;
  FlowState final_state;
  RunStatus status = RunStatus::horizon;
  std::string message;  // StepFailure text when status == step_failure
};

/// Iterates step (plus normalizations) from s0 until a stop condition holds.
/// A StepFailure ends the run with the last accepted state.
RunResult run(const SphericalTransform& transform, const Spectrum& s0, const FlowConfig& config);

/// Support at exactly time t_end (no SL normalization). Throws StepFailure.
Spectrum evolve(const SphericalTransform& transform, const Spectrum& s0, const FlowConfig& config, double t_end);

/// Exponent q = (2n+2) p / (n+1+p) of the ball solution rho^q = rho0^q - q t.
double ball_exponent(int dimension, double p);
double ball_extinction_time(double rho0, int dimension, double p);
/// Radius of the evolving ball; throws Extinct for t >= T.
double ball_exact(double rho0, double t, int dimension, double p);

/// Extinction time extrapolated from the last two records of an unnormalized
/// run, using that (V / omega)^{q/(n+1)} is affine in t for balls.
double extrapolated_extinction_time(const TimeSeries& series, int dimension, double p);

/// Max coefficient deviation between lambda * (s0 evolved to lambda^{-q} t)
/// and (lambda s0) evolved to t. Unnormalized flow.
double scaling_check(const SphericalTransform& transform, const Spectrum& s0, double lambda, double t,
                     const FlowConfig& config);

/// Max nodal deviation between the polar of the evolved body and the polar
/// evolved under the expanding flow, both at time t. Unnormalized flow.
double dual_consistency_run(const SphericalTransform& transform, const Spectrum& s0, const FlowConfig& config,
                            double t);

}  // namespace centroflow
