#include "centroflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "centroflow/duality.hpp"
#include "centroflow/errors.hpp"
#include "centroflow/normalization.hpp"

namespace centroflow {

namespace {

constexpr int kMaxRejections = 20;

// relative tail energy that counts as a blowup when it also grew 100x in one step
constexpr double kTailFloor = 1e-8;

struct Rejected {};

ScalarField flow_rhs(const CurvatureBundle& b, const FlowConfig& config) {
  const double beta = centro_affine_exponent(b.dimension, config.p);
  const double sign = (config.direction == FlowDirection::contracting ? -1.0 : 1.0) * (config.invert_rhs_sign ? -1.0 : 1.0);
  const double e = config.direction == FlowDirection::contracting ? beta : -beta;
  ScalarField f(b.size());
  for (std::size_t k = 0; k < b.size(); ++k) f[k] = sign * b.support[k] * std::pow(b.centro_affine[k], e);
  return f;
}

Spectrum rhs_spectrum(const SphericalTransform& t, const Spectrum& s, const FlowConfig& config) {
  const CurvatureBundle b = curvature_bundle(t.synthesize_jet(s), config.convexity_floor);
  return t.analyze(flow_rhs(b, config));
}

FlowState rebuild(const SphericalTransform& t, Spectrum s, const FlowState& like, double p, double floor) {
  FlowState out = make_state(t, std::move(s), p, like.time, floor);
  out.last_dt = like.last_dt;
  out.odd_drift = like.odd_drift;
  out.accepted = like.accepted;
  out.rejected = like.rejected;
  return out;
}

}  // namespace

void FlowConfig::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError(what); };
  if (dimension != 1 && dimension != 2) fail("dimension must be 1 or 2");
  if (!(p >= 1.0) || !std::isfinite(p)) fail("p must be a finite number >= 1");
  if (lmax < 2) fail("lmax must be at least 2");
  if (!(dt_safety > 0.0 && dt_safety <= 1.0)) fail("dt_safety must lie in (0, 1]");
  if (!(fixed_dt >= 0.0)) fail("fixed_dt must be >= 0");
  if (max_steps < 0) fail("max_steps must be >= 0");
  if (!(horizon > 0.0)) fail("horizon must be positive");
  if (sl_every < 0) fail("sl_every must be >= 0");
  if (!(sl_ratio_trigger > 1.0)) fail("sl_ratio_trigger must exceed 1");
  if (!(sl_contact_tolerance > 0.0)) fail("sl_contact_tolerance must be positive");
  if (!(convexity_floor > 0.0 && convexity_floor < 1.0)) fail("convexity_floor must lie in (0, 1)");
  if (!(stop_deficit >= 0.0)) fail("stop_deficit must be >= 0");
  if (!(stop_volume >= 0.0 && stop_volume < 1.0)) fail("stop_volume must lie in [0, 1)");
  if (snapshot_every < 0) fail("snapshot_every must be >= 0");
  if (!resolution.empty() && resolution.size() != static_cast<std::size_t>(dimension)) {
    fail("resolution needs " + std::to_string(dimension) + " entries");
  }
}

std::vector<std::string> FlowConfig::warnings() const {
  std::vector<std::string> w;
  if (outside_theorem_range()) {
    w.push_back("p = " + std::to_string(p) + " is outside 1 <= p < (n+1)/(n-1) = 3 for n = 2; convergence is not covered");
  }
  return w;
}

std::shared_ptr<const SphericalTransform> make_transform(const FlowConfig& config) {
  if (config.resolution.empty()) return SphericalTransform::for_degree(config.dimension, config.lmax);
  auto grid = std::make_shared<const SphericalGrid>(build_grid(config.dimension, config.resolution));
  return std::make_shared<const SphericalTransform>(std::move(grid), config.lmax);
}

FlowState make_state(const SphericalTransform& transform, Spectrum support, double p, double time,
                     double convexity_floor) {
  FlowState st;
  st.time = time;
  const FieldJet jet = transform.synthesize_jet(support);
  const double smin = *std::min_element(jet.value.begin(), jet.value.end());
  if (!(smin > 0.0)) throw InvalidArgument("support function must be positive: the origin must be interior");
  st.bundle = curvature_bundle(jet, convexity_floor);
  st.metrics = body_metrics(transform.grid(), st.bundle, p);
  st.support = std::move(support);
  return st;
}

ScalarField p_flow_rhs(const CurvatureBundle& bundle, double p) {
  FlowConfig c;
  c.p = p;
  return flow_rhs(bundle, c);
}

ScalarField p_flow_rhs(const SphericalTransform& transform, const Spectrum& support, double p) {
  return p_flow_rhs(curvature_bundle(transform, support), p);
}

double stable_dt(const SphericalTransform& transform, const FlowState& state, const FlowConfig& config) {
  const CurvatureBundle& b = state.bundle;
  const int n = b.dimension;
  const double beta = centro_affine_exponent(n, config.p);
  const ScalarField f = flow_rhs(b, config);
  double d_max = 0.0, rate = 0.0, smin = b.support[0];
  for (std::size_t k = 0; k < b.size(); ++k) {
    const double lambda_min = b.eigen[k * static_cast<std::size_t>(n)];
    d_max = std::max(d_max, beta * std::abs(f[k]) / lambda_min);
    rate = std::max(rate, std::abs(f[k]));
    smin = std::min(smin, b.support[k]);
  }
  const double L = transform.lmax();
  const double diffusion = 2.5 / (d_max * L * (L + n - 1));
  return config.dt_safety * std::min(diffusion, 0.1 * smin / rate);
}

FlowState step(const SphericalTransform& transform, const FlowState& state, const FlowConfig& config, double dt_cap) {
  double dt = config.fixed_dt > 0.0 ? config.fixed_dt : stable_dt(transform, state, config);
  dt = std::min(dt, dt_cap);
  const Spectrum& s = state.support;
  const Spectrum k1 = transform.analyze(flow_rhs(state.bundle, config));
  const double tail_before = s.tail_energy();

  long rejected = state.rejected;
  for (int attempt = 0;; ++attempt) {
    try {
      const Spectrum k2 = rhs_spectrum(transform, Spectrum(s).add_scaled(0.5 * dt, k1), config);
      const Spectrum k3 = rhs_spectrum(transform, Spectrum(s).add_scaled(0.5 * dt, k2), config);
      const Spectrum k4 = rhs_spectrum(transform, Spectrum(s).add_scaled(dt, k3), config);
      Spectrum next = s;
      next.add_scaled(dt / 6.0, k1).add_scaled(dt / 3.0, k2).add_scaled(dt / 3.0, k3).add_scaled(dt / 6.0, k4);
      const double odd = next.odd_energy();
      next = project_even(std::move(next));
      const double tail = next.tail_energy();
      if (tail > kTailFloor && tail > 100.0 * tail_before) throw Rejected{};

      FlowState out = make_state(transform, std::move(next), config.p, state.time + dt,
                                 config.convexity_floor);
      out.last_dt = dt;
      out.odd_drift = odd;
      out.accepted = state.accepted + 1;
      out.rejected = rejected;
      if (config.normalize_volume) out = volume_normalize(transform, out, config.p, config.convexity_floor);
      return out;
    } catch (const ConvexityViolation&) {
    } catch (const InvalidArgument&) {
    } catch (const Rejected&) {
    }
    ++rejected;
    if (attempt + 1 >= kMaxRejections) {
      throw StepFailure("step rejected " + std::to_string(kMaxRejections) + " times in a row at t = " +
                        std::to_string(state.time) + " (last dt = " + std::to_string(dt) + ")");
    }
    dt *= 0.5;
  }
}

FlowState volume_normalize(const SphericalTransform& transform, const FlowState& state, double p,
                           double convexity_floor) {
  const int n = transform.dimension();
  const double factor = std::pow(unit_ball_volume(n) / state.metrics.volume, 1.0 / (n + 1.0));
  Spectrum s = state.support;
  s *= factor;
  return rebuild(transform, std::move(s), state, p, convexity_floor);
}

DiagnosticsRecord diagnostics(const SphericalTransform& transform, const FlowState& state) {
  const CurvatureBundle& b = state.bundle;
  const int n = b.dimension;
  DiagnosticsRecord r;
  r.t = state.time;
  r.dt = state.last_dt;
  r.volume = state.metrics.volume;
  r.omega_p = state.metrics.p_area;
  r.ratio = state.metrics.ratio;
  r.ratio_pre_sl = r.ratio;
  r.deficit = state.metrics.deficit;
  r.r_minus = state.metrics.r_minus;
  r.r_plus = state.metrics.r_plus;
  const auto [smin, smax] = std::minmax_element(b.support.begin(), b.support.end());
  r.s_min = *smin;
  r.s_max = *smax;
  const auto [gmin, gmax] = std::minmax_element(b.gauss.begin(), b.gauss.end());
  r.gauss_min = *gmin;
  r.gauss_max = *gmax;
  const auto [kmin, kmax] = std::minmax_element(b.kappa.begin(), b.kappa.end());
  r.kappa_min = *kmin;
  r.kappa_max = *kmax;
  const auto [hmin, hmax] = std::minmax_element(b.mean.begin(), b.mean.end());
  r.mean_min = *hmin;
  r.mean_max = *hmax;
  const double factor = std::pow(unit_ball_volume(n) / r.volume, 1.0 / (n + 1.0));
  for (double v : b.support) r.dist_ball = std::max(r.dist_ball, std::abs(factor * v - 1.0));
  r.odd_energy = state.odd_drift;
  r.tail_energy = state.support.tail_energy();
  (void)transform;
  return r;
}

const char* to_string(RunStatus status) {
  switch (status) {
    case RunStatus::converged: return "converged";
    case RunStatus::volume_floor: return "volume_floor";
    case RunStatus::horizon: return "horizon";
    case RunStatus::step_budget: return "step_budget";
    case RunStatus::step_failure: return "step_failure";
  }
  return "unknown";
}

RunResult run(const SphericalTransform& transform, const Spectrum& s0, const FlowConfig& config) {
  config.validate();
  if (s0.dimension() != transform.dimension()) throw InvalidArgument("initial body has the wrong dimension");
  const int n = transform.dimension();
  const double omega = unit_ball_volume(n);

  FlowState state = make_state(transform, project_even(s0.resized(transform.lmax())), config.p, 0.0,
                               config.convexity_floor);
  if (config.normalize_volume) state = volume_normalize(transform, state, config.p, config.convexity_floor);

  RunResult result;
  auto& series = result.series;
  series.records.push_back(diagnostics(transform, state));
  Eigen::MatrixXd map = Eigen::MatrixXd::Identity(n + 1, n + 1);
  series.snapshots.push_back({state.time, state.support, map});

  LownerOptions sl_options;
  sl_options.contact_tolerance = config.sl_contact_tolerance;

  for (long steps = 0;; ++steps) {
    if (config.stop_deficit > 0.0 && state.metrics.deficit < config.stop_deficit) {
      result.status = RunStatus::converged;
      break;
    }
    if (config.stop_volume > 0.0 && state.metrics.volume < config.stop_volume * omega) {
      result.status = RunStatus::volume_floor;
      break;
    }
    if (state.time >= config.horizon) {
      result.status = RunStatus::horizon;
      break;
    }
    if (steps >= config.max_steps) {
      result.status = RunStatus::step_budget;
      break;
    }

    FlowState next;
    try {
      next = step(transform, state, config, config.horizon - state.time);
    } catch (const StepFailure& e) {
      result.status = RunStatus::step_failure;
      result.message = e.what();
      break;
    }
    if (next.time >= config.horizon * (1.0 - 1e-14)) next.time = config.horizon;

    const double ratio_pre = next.metrics.ratio;
    bool sl = false;
    // SL normalization fixes the volume, so it only runs in volume-preserving mode
    if (config.normalize_volume) {
      const double spread = *std::max_element(next.bundle.support.begin(), next.bundle.support.end()) /
                            *std::min_element(next.bundle.support.begin(), next.bundle.support.end());
      const bool due = config.sl_every > 0 && next.accepted % config.sl_every == 0;
      if (due || spread > config.sl_ratio_trigger) {
        try {
          const SlNormalized r = sl_normalize(transform, next.support, sl_options);
          next = rebuild(transform, r.support, next, config.p, config.convexity_floor);
          map = r.map.matrix() * map;
          sl = true;
        } catch (const ConvexityViolation&) {
        } catch (const DegenerateSpan&) {
        }
      }
    }
    state = std::move(next);
    DiagnosticsRecord rec = diagnostics(transform, state);
    rec.ratio_pre_sl = ratio_pre;
    rec.sl_applied = sl;
    series.records.push_back(rec);
    if (config.snapshot_every > 0 && state.accepted % config.snapshot_every == 0) {
      series.snapshots.push_back({state.time, state.support, map});
    }
  }
  if (series.snapshots.back().t != state.time) series.snapshots.push_back({state.time, state.support, map});
  result.final_state = std::move(state);
  return result;
}

Spectrum evolve(const SphericalTransform& transform, const Spectrum& s0, const FlowConfig& config, double t_end) {
  FlowConfig c = config;
  c.horizon = t_end;
  c.stop_deficit = 0.0;
  c.stop_volume = 0.0;
  c.sl_every = 0;
  c.sl_ratio_trigger = std::numeric_limits<double>::infinity();
  c.max_steps = std::numeric_limits<long>::max();
  const RunResult r = run(transform, s0, c);
  if (r.status == RunStatus::step_failure) throw StepFailure(r.message);
  return r.final_state.support;
}

double ball_exponent(int dimension, double p) { return (2.0 * dimension + 2.0) * p / (dimension + 1.0 + p); }

double ball_extinction_time(double rho0, int dimension, double p) {
  const double q = ball_exponent(dimension, p);
  return std::pow(rho0, q) / q;
}

double ball_exact(double rho0, double t, int dimension, double p) {
  if (!(rho0 > 0.0) || t < 0.0) throw InvalidArgument("ball_exact needs rho0 > 0 and t >= 0");
  const double q = ball_exponent(dimension, p);
  const double base = std::pow(rho0, q) - q * t;
  if (!(base > 0.0)) throw Extinct("t = " + std::to_string(t) + " is at or past the extinction time");
  return std::pow(base, 1.0 / q);
}

double extrapolated_extinction_time(const TimeSeries& series, int dimension, double p) {
  const auto& r = series.records;
  if (r.size() < 2) throw InvalidArgument("need two records to extrapolate");
  const double e = ball_exponent(dimension, p) / (dimension + 1.0);
  const double omega = unit_ball_volume(dimension);
  const auto& a = r[r.size() - 2];
  const auto& b = r.back();
  const double ya = std::pow(a.volume / omega, e), yb = std::pow(b.volume / omega, e);
  return b.t + yb * (b.t - a.t) / (ya - yb);
}

double scaling_check(const SphericalTransform& transform, const Spectrum& s0, double lambda, double t,
                     const FlowConfig& config) {
  FlowConfig c = config;
  c.normalize_volume = false;
  const double q = ball_exponent(transform.dimension(), c.p);
  const Spectrum a = lambda * evolve(transform, s0, c, std::pow(lambda, -q) * t);
  const Spectrum b = evolve(transform, lambda * s0, c, t);
  return max_abs_difference(a, b);
}

double dual_consistency_run(const SphericalTransform& transform, const Spectrum& s0, const FlowConfig& config,
                            double t) {
  FlowConfig c = config;
  c.normalize_volume = false;
  c.direction = FlowDirection::contracting;
  const Spectrum a = polar_support(transform, evolve(transform, s0, c, t)).support;
  c.direction = FlowDirection::expanding;
  const Spectrum b = evolve(transform, polar_support(transform, s0).support, c, t);
  const ScalarField va = transform.synthesize(a), vb = transform.synthesize(b);
  double d = 0.0;
  for (std::size_t k = 0; k < va.size(); ++k) d = std::max(d, std::abs(va[k] - vb[k]));
  return d;
}

}  // namespace centroflow
