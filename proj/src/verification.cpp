#include "centroflow/verification.hpp"

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <algorithm>
#include <functional>
#include <numbers>

#include "centroflow/duality.hpp"
#include "centroflow/errors.hpp"
#include "centroflow/flow.hpp"
#include "centroflow/geometry.hpp"
#include "centroflow/normalization.hpp"
#include "centroflow/report.hpp"
#include "centroflow/shapes.hpp"

namespace centroflow {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string format(const char* fmt, ...) {
  char buf[512];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, args);
  va_end(args);
  return buf;
}

Spectrum ball(const SphericalTransform& t, double radius = 1.0) {
  ShapeSpec s;
  s.radius = radius;
  return make_shape(t, s);
}

Spectrum ellipsoid(const SphericalTransform& t, std::vector<double> axes) {
  ShapeSpec s;
  s.kind = ShapeSpec::Kind::ellipsoid;
  s.axes = std::move(axes);
  return make_shape(t, s);
}

// 1 + amplitude * Y, with Y the orthonormal degree-`degree` function
// cos(l t)/sqrt(pi) (n = 1) or the zonal harmonic (n = 2)
Spectrum perturbed_ball(const SphericalTransform& t, double amplitude, int degree) {
  Spectrum s = ball(t);
  s.at(degree, t.dimension() == 1 ? degree : 0) = amplitude;
  return s;
}

FlowConfig base_config(int n, double p, int lmax, const VerifyOptions& options) {
  FlowConfig c;
  c.dimension = n;
  c.p = p;
  c.lmax = lmax;
  c.stop_deficit = 0.0;  // suites set their own stopping rules
  c.invert_rhs_sign = options.invert_rhs_sign;
  return c;
}

// ---------------------------------------------------------------------------
// 1. ball extinction

CheckResult ball_suite(const VerifyOptions& options) {
  CheckResult r{"ball", true, "", 0.0};
  const std::pair<int, double> cases[] = {{1, 1.0}, {1, 2.0}, {2, 1.0}, {2, 1.5}};
  double worst_rel = 0.0, worst_T = 0.0, slowest = 0.0;
  for (const auto& [n, p] : cases) {
    const auto start = Clock::now();
    auto t = SphericalTransform::for_degree(n, 8);
    FlowConfig c = base_config(n, p, 8, options);
    c.normalize_volume = false;
    c.dt_safety = 0.05;
    c.stop_volume = 0.01;
    const double T = ball_extinction_time(1.0, n, p);
    c.horizon = 2.0 * T;
    c.max_steps = 20000;
    const RunResult run_result = run(*t, ball(*t), c);
    bool ok = run_result.status == RunStatus::volume_floor;
    double rel = 0.0;
    for (const auto& rec : run_result.series.records) {
      double rho = 0.0;
      try {
        rho = ball_exact(1.0, rec.t, n, p);
      } catch (const Extinct&) {
        ok = false;
        break;
      }
      rel = std::max({rel, std::abs(rec.s_min / rho - 1.0), std::abs(rec.s_max / rho - 1.0)});
    }
    double t_err = 1.0;
    if (ok) t_err = std::abs(extrapolated_extinction_time(run_result.series, n, p) / T - 1.0);
    const double secs = seconds_since(start);
    ok = ok && rel <= 1e-6 && t_err <= 1e-3 && secs < 10.0;
    r.passed = r.passed && ok;
    worst_rel = std::max(worst_rel, rel);
    worst_T = std::max(worst_T, t_err);
    slowest = std::max(slowest, secs);
    if (!ok) r.detail += format("(n=%d,p=%g) failed [%s, rel %.2e, T err %.2e]; ", n, p, to_string(run_result.status), rel, t_err);
  }
  r.detail += format("max rel radius error %.2e (<= 1e-6), max extinction time error %.2e (<= 1e-3), slowest case %.2fs (< 10s)",
                     worst_rel, worst_T, slowest);
  return r;
}

// ---------------------------------------------------------------------------
// 2. ellipsoid self-similarity

CheckResult ellipsoid_suite(const VerifyOptions& options) {
  CheckResult r{"ellipsoid", true, "", 0.0};
  struct Case {
    int n;
    int lmax;
    std::vector<double> axes;
  };
  const Case cases[] = {{1, 64, {2.0, 0.5}}, {2, 48, {2.0, 1.0, 0.5}}};
  const std::vector<double> ps = options.quick ? std::vector<double>{1.0} : std::vector<double>{1.0, 2.0};
  const long steps = options.quick ? 100 : 1000;
  const auto start = Clock::now();
  double worst = 0.0;
  for (const auto& cs : cases) {
    auto t = SphericalTransform::for_degree(cs.n, cs.lmax);
    const Spectrum s0 = normalize_volume(*t, ellipsoid(*t, cs.axes));
    for (double p : ps) {
      FlowConfig c = base_config(cs.n, p, cs.lmax, options);
      c.max_steps = steps;
      c.snapshot_every = 1;
      const RunResult res = run(*t, s0, c);
      double drift = res.status == RunStatus::step_budget ? 0.0 : 1.0;
      for (const auto& snap : res.series.snapshots) drift = std::max(drift, max_abs_difference(snap.support, s0));
      if (res.final_state.accepted != steps) drift = std::max(drift, 1.0);
      worst = std::max(worst, drift);
      if (drift > 1e-6) r.detail += format("(n=%d,p=%g) drift %.2e; ", cs.n, p, drift);
    }
  }
  const double secs = seconds_since(start);
  r.passed = worst <= 1e-6 && secs < 60.0;
  r.detail += format("max coefficient drift over %ld steps %.2e (<= 1e-6), %.1fs (< 60s)", steps, worst, secs);
  return r;
}

// ---------------------------------------------------------------------------
// 3, 4, 7. random bodies

struct BodyRun {
  int n = 1;
  double p = 1.0;
  std::uint64_t seed = 0;
  RunResult result;
  double final_distance = -1.0;
  std::string error;
};

struct RandomSuite {
  std::vector<BodyRun> runs;
  double seconds = 0.0;
};

RandomSuite random_suite(const VerifyOptions& options) {
  RandomSuite suite;
  const auto start = Clock::now();
  const int bodies = options.quick ? 2 : 20;
  const std::pair<int, std::vector<double>> families[] = {{1, {1.0, 2.0, 4.0}}, {2, {1.0, 2.0}}};
  for (const auto& [n, ps] : families) {
    const int lmax = n == 1 ? 32 : 16;
    auto t = SphericalTransform::for_degree(n, lmax);
    for (double p : ps) {
      for (int b = 0; b < bodies; ++b) {
        BodyRun br;
        br.n = n;
        br.p = p;
        br.seed = 1000 + static_cast<std::uint64_t>(b);
        FlowConfig c = base_config(n, p, lmax, options);
        c.stop_deficit = 1e-5;
        c.sl_every = 50;
        c.max_steps = 20000;
        try {
          ShapeSpec spec;
          spec.kind = ShapeSpec::Kind::random;
          spec.seed = br.seed;
          spec.amplitude = 0.1;
          spec.max_degree = 8;
          br.result = run(*t, make_shape(*t, spec), c);
          const SlNormalized sl = sl_normalize(*t, br.result.final_state.support);
          br.final_distance = distance_to_ball(*t, sl.support);
        } catch (const Error& e) {
          br.error = e.what();
        }
        suite.runs.push_back(std::move(br));
      }
    }
  }
  suite.seconds = seconds_since(start);
  return suite;
}

std::string label(const BodyRun& b) { return format("(n=%d,p=%g,seed=%llu)", b.n, b.p, static_cast<unsigned long long>(b.seed)); }

CheckResult monotonicity_check(const RandomSuite& suite) {
  CheckResult r{"monotonicity", true, "", suite.seconds};
  double worst = 0.0, min_deficit = 1.0;
  std::size_t steps = 0, failures = 0;
  for (const auto& b : suite.runs) {
    bool ok = b.error.empty() && b.result.status != RunStatus::step_failure;
    const auto& rec = b.result.series.records;
    for (std::size_t i = 0; i < rec.size(); ++i) {
      min_deficit = std::min(min_deficit, rec[i].deficit);
      if (rec[i].deficit < -1e-8) ok = false;
      if (i == 0) continue;
      const double rel = (rec[i].ratio_pre_sl - rec[i - 1].ratio) / rec[i - 1].ratio;
      worst = std::min(worst, rel);
      if (rel < -1e-9) ok = false;
      ++steps;
    }
    if (!ok) {
      ++failures;
      if (failures <= 3) r.detail += label(b) + (b.error.empty() ? "" : " " + b.error) + "; ";
    }
  }
  r.passed = failures == 0 && suite.seconds < 300.0;
  r.detail += format("%zu runs, %zu steps, %zu failing; worst relative ratio change %.2e (>= -1e-9), min deficit %.2e "
                     "(>= -1e-8), %.1fs (< 300s)",
                     suite.runs.size(), steps, failures, worst, min_deficit, suite.seconds);
  return r;
}

CheckResult convergence_check(const RandomSuite& suite) {
  CheckResult r{"convergence", true, "", suite.seconds};
  double worst = 0.0;
  std::size_t failures = 0, counted = 0;
  for (const auto& b : suite.runs) {
    if (b.n == 2 && b.p >= 3.0) continue;  // outside the theorem's range
    ++counted;
    const bool ok = b.error.empty() && b.result.status == RunStatus::converged && b.final_distance >= 0.0 &&
                    b.final_distance < 0.01;
    worst = std::max(worst, b.error.empty() ? b.final_distance : 1.0);
    if (!ok) {
      ++failures;
      if (failures <= 3) r.detail += label(b) + " " + to_string(b.result.status) + "; ";
    }
  }
  r.passed = failures == 0 && suite.seconds < 600.0;
  r.detail += format("%zu runs, %zu failing; max distance to ball after SL normalization %.2e (< 0.01), %.1fs (< 600s)",
                     counted, failures, worst, suite.seconds);
  return r;
}

CheckResult curvature_check(const RandomSuite& suite) {
  CheckResult r{"curvature", true, "", suite.seconds};
  double k_min = INFINITY, kappa_max = 0.0;
  std::size_t failures = 0, records = 0;
  for (const auto& b : suite.runs) {
    bool ok = b.error.empty();
    for (const auto& rec : b.result.series.records) {
      ++records;
      const std::string v = record_violation(rec);
      if (!v.empty()) {
        ok = false;
        if (failures < 3) r.detail += label(b) + " " + v + "; ";
      }
      k_min = std::min(k_min, rec.gauss_min);
      kappa_max = std::max(kappa_max, rec.kappa_max);
    }
    if (!ok) ++failures;
  }
  r.passed = failures == 0;
  r.detail += format("%zu records in %zu runs; min K %.3g > 0, max kappa %.3g finite", records, suite.runs.size(), k_min,
                     kappa_max);
  return r;
}

// ---------------------------------------------------------------------------
// 5. duality

CheckResult duality_suite(const VerifyOptions& options) {
  CheckResult r{"duality", true, "", 0.0};
  struct Body {
    std::string name;
    int n;
    int lmax;
    std::function<Spectrum(const SphericalTransform&)> make;
  };
  const std::vector<Body> bodies = {
      {"ball", 1, 32, [](const SphericalTransform& t) { return ball(t); }},
      {"ball", 2, 32, [](const SphericalTransform& t) { return ball(t); }},
      {"ellipse(2,1/2)", 1, 64, [](const SphericalTransform& t) { return ellipsoid(t, {2.0, 0.5}); }},
      {"ellipsoid(1.25,1,0.8)", 2, 32, [](const SphericalTransform& t) { return ellipsoid(t, {1.25, 1.0, 0.8}); }},
      {"ball+0.05Y2", 1, 32, [](const SphericalTransform& t) { return perturbed_ball(t, 0.05, 2); }},
      {"ball+0.05Y2", 2, 32, [](const SphericalTransform& t) { return perturbed_ball(t, 0.05, 2); }},
  };
  double worst_identity = 0.0, worst_flow = 0.0, worst_shrink = INFINITY;
  for (const auto& b : bodies) {
    auto fine = SphericalTransform::for_degree(b.n, b.lmax);
    auto coarse = SphericalTransform::for_degree(b.n, b.lmax / 2);
    double identity = 1.0, coarse_identity = 1.0, flow = 1.0;
    std::string error;
    try {
      identity = centro_affine_identity_residual(*fine, b.make(*fine));
      coarse_identity = centro_affine_identity_residual(*coarse, b.make(*coarse));
      if (!options.quick || b.n == 1) {
        FlowConfig c = base_config(b.n, 1.0, b.lmax, options);
        flow = dual_consistency_run(*fine, b.make(*fine), c, 0.1);
      } else {
        flow = 0.0;
      }
    } catch (const Error& e) {
      error = e.what();
    }
    // a coarse residual at round-off level cannot shrink further
    const bool at_floor = coarse_identity <= 1e-10 && identity <= 1e-10;
    const double shrink = coarse_identity / identity;
    const bool ok = error.empty() && identity <= 1e-5 && flow <= 1e-4 && (at_floor || shrink >= 4.0);
    worst_identity = std::max(worst_identity, identity);
    worst_flow = std::max(worst_flow, flow);
    if (!at_floor) worst_shrink = std::min(worst_shrink, shrink);
    if (!ok) {
      r.passed = false;
      r.detail += format("%s n=%d: identity %.2e, flow %.2e, shrink %.1f %s; ", b.name.c_str(), b.n, identity, flow,
                         shrink, error.c_str());
    }
  }
  r.detail += format("max identity residual %.2e (<= 1e-5), max polar flow deviation %.2e (<= 1e-4), min shrink "
                     "factor under doubling %.3g (>= 4)",
                     worst_identity, worst_flow, worst_shrink);
  return r;
}

// ---------------------------------------------------------------------------
// 6. scaling

CheckResult scaling_suite(const VerifyOptions& options) {
  CheckResult r{"scaling", true, "", 0.0};
  auto t = SphericalTransform::for_degree(1, 32);
  const FlowConfig c = base_config(1, 1.0, 32, options);
  const Spectrum s0 = perturbed_ball(*t, 0.1, 4);
  double worst = 0.0;
  for (double lambda : {0.5, 2.0}) {
    double d = 1.0;
    try {
      d = scaling_check(*t, s0, lambda, 0.1, c);
    } catch (const Error& e) {
      r.detail += format("lambda=%g: %s; ", lambda, e.what());
    }
    worst = std::max(worst, d);
  }
  r.passed = worst <= 1e-6;
  r.detail += format("max coefficient deviation %.2e (<= 1e-6) for lambda in {1/2, 2}, t = 0.1", worst);
  return r;
}

// ---------------------------------------------------------------------------
// 8. static geometry

CheckResult geometry_suite(const VerifyOptions&) {
  CheckResult r{"geometry", true, "", 0.0};
  auto fail = [&r](const std::string& what) {
    r.passed = false;
    r.detail += what + "; ";
  };
  double ball_err = 0.0;
  for (int n : {1, 2}) {
    auto t = SphericalTransform::for_degree(n, 8);
    const double omega = unit_ball_volume(n);
    for (double p : {1.0, 2.0, 4.0}) {
      const CurvatureBundle b = curvature_bundle(*t, ball(*t));
      const BodyMetrics m = body_metrics(t->grid(), b, p);
      ball_err = std::max({ball_err, std::abs(m.volume / omega - 1.0), std::abs(m.p_area / ((n + 1) * omega) - 1.0),
                           std::abs(m.deficit)});
    }
  }
  if (ball_err > 1e-12) fail(format("unit ball values off by %.2e", ball_err));

  // ellipse (2, 1/2): V = pi, K0 = 1, kappa at the long axis tip = a / b^2 = 8
  auto t = SphericalTransform::for_degree(1, 128);
  const Spectrum e = ellipsoid(*t, {2.0, 0.5});
  const CurvatureBundle eb = curvature_bundle(*t, e);
  const double v_err = std::abs(volume(t->grid(), eb) / std::numbers::pi - 1.0);
  double k0_err = 0.0;
  for (double k0 : eb.centro_affine) k0_err = std::max(k0_err, std::abs(k0 - 1.0));
  const double kappa_tip = eb.kappa[0];  // node 0 is the direction e1
  if (v_err > 1e-12) fail(format("ellipse volume off by %.2e", v_err));
  if (k0_err > 1e-8) fail(format("ellipse K0 off by %.2e", k0_err));
  if (std::abs(kappa_tip - 8.0) > 1e-8 * 8.0) fail(format("ellipse tip curvature %.12g != 8", kappa_tip));

  const PolarSupport polar = polar_support(*t, e);
  const double polar_err = max_abs_difference(polar.support, ellipsoid(*t, {0.5, 2.0}));
  if (polar_err > 1e-8) fail(format("polar axis inversion off by %.2e", polar_err));

  // spectral derivatives against central differences along geodesics
  double fd_err = 0.0;
  for (int n : {1, 2}) {
    auto tn = SphericalTransform::for_degree(n, 16);
    ShapeSpec spec;
    spec.kind = ShapeSpec::Kind::random;
    spec.seed = 5;
    const Spectrum s = make_shape(*tn, spec);
    const FieldJet jet = tn->synthesize_jet(s);
    const auto& g = tn->grid();
    const double h = 2e-4;
    for (std::size_t k = 0; k < g.size(); k += 7) {
      const Vec3& z = g.node(k);
      auto along = [&](const Vec3& v, double a) {
        Vec3 p{};
        for (int c = 0; c < 3; ++c) p[c] = std::cos(a) * z[c] + std::sin(a) * v[c];
        return evaluate_at(s, p);
      };
      auto second = [&](const Vec3& v) { return (along(v, h) - 2.0 * jet.value[k] + along(v, -h)) / (h * h); };
      for (int i = 0; i < n; ++i) {
        const Vec3& e_i = g.tangent(k, i);
        fd_err = std::max(fd_err, std::abs((along(e_i, h) - along(e_i, -h)) / (2.0 * h) - jet.gradient(k, i)));
        fd_err = std::max(fd_err, std::abs(second(e_i) - jet.hessian(k, i, i)));
      }
      if (n == 2) {
        Vec3 d{};
        for (int c = 0; c < 3; ++c) d[c] = (g.tangent(k, 0)[c] + g.tangent(k, 1)[c]) / std::sqrt(2.0);
        const double expect = 0.5 * (jet.hessian(k, 0, 0) + 2.0 * jet.hessian(k, 0, 1) + jet.hessian(k, 1, 1));
        fd_err = std::max(fd_err, std::abs(second(d) - expect));
      }
    }
  }
  if (fd_err > 1e-6) fail(format("spectral vs finite-difference derivatives differ by %.2e", fd_err));

  r.detail += format("ball %.1e, ellipse volume %.1e, K0 %.1e, tip curvature %.1e, polar %.1e, derivatives %.1e", ball_err,
                     v_err, k0_err, std::abs(kappa_tip - 8.0), polar_err, fd_err);
  return r;
}

CheckResult timed(const std::function<CheckResult()>& f) {
  const auto start = Clock::now();
  CheckResult r = f();
  if (r.seconds == 0.0) r.seconds = seconds_since(start);
  return r;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"ball",    "ellipsoid", "monotonicity", "convergence",
                                                 "duality", "scaling",   "curvature",    "geometry"};
  return names;
}

CheckResult run_suite(const std::string& name, const VerifyOptions& options) {
  if (name == "ball") return timed([&] { return ball_suite(options); });
  if (name == "ellipsoid") return timed([&] { return ellipsoid_suite(options); });
  if (name == "monotonicity") return monotonicity_check(random_suite(options));
  if (name == "convergence") return convergence_check(random_suite(options));
  if (name == "curvature") return curvature_check(random_suite(options));
  if (name == "duality") return timed([&] { return duality_suite(options); });
  if (name == "scaling") return timed([&] { return scaling_suite(options); });
  if (name == "geometry") return timed([&] { return geometry_suite(options); });
  throw InvalidArgument("unknown suite '" + name + "'");
}

std::vector<CheckResult> run_all_suites(const VerifyOptions& options) {
  std::vector<CheckResult> out;
  const RandomSuite random = random_suite(options);
  for (const auto& name : suite_names()) {
    if (name == "monotonicity") {
      out.push_back(monotonicity_check(random));
    } else if (name == "convergence") {
      out.push_back(convergence_check(random));
    } else if (name == "curvature") {
      out.push_back(curvature_check(random));
    } else {
      out.push_back(run_suite(name, options));
    }
  }
  return out;
}

}  // namespace centroflow
