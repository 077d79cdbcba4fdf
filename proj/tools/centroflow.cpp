// Command-line front end: run, verify, polar, normalize, shape.
//
// Exit codes: 0 success, 1 failed verification or unexpected error,
// 2 step failure during a run, 3 configuration or input error.

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "centroflow/config.hpp"
#include "centroflow/duality.hpp"
#include "centroflow/errors.hpp"
#include "centroflow/flow.hpp"
#include "centroflow/normalization.hpp"
#include "centroflow/report.hpp"
#include "centroflow/shapes.hpp"
#include "centroflow/verification.hpp"

namespace fs = std::filesystem;
using namespace centroflow;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitStepFailure = 2;
constexpr int kExitConfig = 3;

// Flags shared by every subcommand that builds a body.
struct BodyFlags {
  std::optional<int> dimension;
  std::optional<double> p;
  std::optional<int> lmax;
  std::optional<long long> seed;
  std::optional<std::string> shape;
  std::vector<double> axes;
  std::optional<std::string> output_dir;
  std::optional<std::string> input;
};

void add_body_flags(CLI::App* app, BodyFlags& f) {
  app->add_option("--dimension", f.dimension, "sphere dimension n (1 or 2)");
  app->add_option("--lmax", f.lmax, "truncation degree");
  app->add_option("--seed", f.seed, "seed for random shapes");
  app->add_option("--shape", f.shape, "ball[(r)], ellipsoid, random[(seed,amplitude,max_degree)]");
  app->add_option("--axes", f.axes, "ellipsoid semi-axes, n+1 values")->delimiter(',');
  app->add_option("--output-dir", f.output_dir, "directory for output files (default: stdout / config value)");
}

std::string number(double v) {
  char buf[32];
  return std::string(buf, std::to_chars(buf, buf + sizeof buf, v).ptr);
}

void apply_body_flags(RunConfig& c, const BodyFlags& f) {
  if (f.dimension) set_config_value(c, "dimension", std::to_string(*f.dimension));
  if (f.p) set_config_value(c, "p", number(*f.p));
  if (f.lmax) set_config_value(c, "lmax", std::to_string(*f.lmax));
  if (f.seed) set_config_value(c, "seed", std::to_string(*f.seed));
  if (f.shape) c.shape = *f.shape;
  if (!f.axes.empty()) {
    if (f.shape && f.shape->rfind("ellipsoid", 0) != 0) throw ConfigError("--axes only applies to ellipsoid shapes");
    std::string shape = "ellipsoid(";
    for (std::size_t i = 0; i < f.axes.size(); ++i) shape += (i ? "," : "") + number(f.axes[i]);
    c.shape = shape + ")";
  }
  if (f.output_dir) c.output_dir = *f.output_dir;
}

// Body from --input (a coefficient file) or from the shape flags.
Spectrum load_body(const RunConfig& c, const BodyFlags& f, const SphericalTransform& t) {
  if (f.input) {
    std::ifstream in(*f.input);
    if (!in) throw ConfigError("cannot open '" + *f.input + "'");
    const CoefficientFile file = read_coefficients(in);
    if (file.support.dimension() != t.dimension()) throw ConfigError("input dimension does not match --dimension");
    return project_even(file.support.resized(t.lmax()));
  }
  return make_shape(t, c.shape_spec());
}

void emit(const BodyFlags& f, const std::string& name, const CoefficientFile& file) {
  if (!f.output_dir) {
    write_coefficients(std::cout, file);
    return;
  }
  fs::create_directories(*f.output_dir);
  std::ofstream out(fs::path(*f.output_dir) / (name + ".json"));
  write_coefficients(out, file);
}

int run_command(const std::optional<std::string>& config_path, const BodyFlags& flags, std::optional<long> steps,
                std::optional<int> normalize_every, std::optional<double> dt_safety) {
  RunConfig config = config_path ? load_config(*config_path) : RunConfig{};
  apply_body_flags(config, flags);
  if (steps) set_config_value(config, "max_steps", std::to_string(*steps));
  if (normalize_every) set_config_value(config, "sl_every", std::to_string(*normalize_every));
  if (dt_safety) config.flow.dt_safety = *dt_safety;
  config.validate();
  for (const auto& w : config.flow.warnings()) std::cerr << "warning: " << w << '\n';

  const auto transform = make_transform(config.flow);
  const Spectrum s0 = load_body(config, flags, *transform);
  const RunResult result = run(*transform, s0, config.flow);

  const fs::path dir(config.output_dir);
  fs::create_directories(dir / "snapshots");
  {
    std::ofstream csv(dir / "diagnostics.csv");
    write_csv(csv, result.series.records);
  }
  for (std::size_t i = 0; i < result.series.snapshots.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "snapshot_%06zu.json", i);
    std::ofstream out(dir / "snapshots" / name);
    write_coefficients(out, result.series.snapshots[i]);
  }
  {
    std::ofstream cfg(dir / "config.txt");
    write_config(cfg, config);
    std::ofstream summary(dir / "summary.json");
    write_summary(summary, config, result);
  }
  std::cout << "status: " << to_string(result.status) << ", steps: " << result.final_state.accepted
            << ", t = " << format_exact(result.final_state.time)
            << ", deficit = " << format_exact(result.series.records.back().deficit) << '\n';
  if (result.status == RunStatus::step_failure) {
    std::cerr << "step failure: " << result.message << '\n';
    return kExitStepFailure;
  }
  return 0;
}

int verify_command(const std::string& suite, bool quick, bool invert) {
  VerifyOptions options;
  options.quick = quick;
  options.invert_rhs_sign = invert;
  std::vector<CheckResult> results;
  if (suite == "all") {
    results = run_all_suites(options);
  } else {
    results.push_back(run_suite(suite, options));
  }
  bool all = true;
  for (const auto& r : results) {
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
    all = all && r.passed;
  }
  return all ? 0 : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulator for the p-centro-affine flow of symmetric convex bodies"};
  app.require_subcommand(1);

  BodyFlags run_flags, polar_flags, norm_flags, shape_flags;
  std::optional<std::string> config_path;
  std::optional<long> steps;
  std::optional<int> normalize_every;
  std::optional<double> dt_safety;
  auto* run_cmd = app.add_subcommand("run", "evolve a body and write diagnostics.csv, snapshots and summary.json");
  run_cmd->add_option("--config", config_path, "key = value configuration file")->check(CLI::ExistingFile);
  add_body_flags(run_cmd, run_flags);
  run_cmd->add_option("--p", run_flags.p, "flow exponent p >= 1");
  run_cmd->add_option("--steps", steps, "maximum number of accepted steps");
  run_cmd->add_option("--normalize-every", normalize_every, "steps between SL normalizations (0: only when elongated)");
  run_cmd->add_option("--dt-safety", dt_safety, "time step safety factor in (0, 1]");
  run_cmd->add_option("--input", run_flags.input, "initial body as a coefficient file");

  std::string suite = "all";
  bool quick = false, invert = false;
  auto* verify_cmd = app.add_subcommand("verify", "run acceptance suites");
  verify_cmd->add_option("--suite", suite, "suite name or 'all'");
  verify_cmd->add_flag("--quick", quick, "reduced problem sizes");
  verify_cmd->add_flag("--invert-rhs", invert, "test hook: flip the sign of the flow (suites must fail)");

  auto* polar_cmd = app.add_subcommand("polar", "support function of the polar body");
  add_body_flags(polar_cmd, polar_flags);
  polar_cmd->add_option("--input", polar_flags.input, "body as a coefficient file");

  auto* norm_cmd = app.add_subcommand("normalize", "SL(n+1) normalization of a body");
  add_body_flags(norm_cmd, norm_flags);
  norm_cmd->add_option("--input", norm_flags.input, "body as a coefficient file");

  auto* shape_cmd = app.add_subcommand("shape", "coefficients of a generated body");
  add_body_flags(shape_cmd, shape_flags);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) return run_command(config_path, run_flags, steps, normalize_every, dt_safety);
    if (verify_cmd->parsed()) {
      if (suite != "all") {
        const auto& names = suite_names();
        if (std::find(names.begin(), names.end(), suite) == names.end()) {
          std::cerr << "error: unknown suite '" << suite << "'\n";
          return kExitConfig;
        }
      }
      return verify_command(suite, quick, invert);
    }

    const BodyFlags& flags = polar_cmd->parsed() ? polar_flags : norm_cmd->parsed() ? norm_flags : shape_flags;
    RunConfig config;
    config.shape = "ball";
    apply_body_flags(config, flags);
    config.validate();
    const auto transform = make_transform(config.flow);
    const Spectrum body = load_body(config, flags, *transform);
    CoefficientFile out;
    if (polar_cmd->parsed()) {
      const PolarSupport polar = polar_support(*transform, body);
      out.support = polar.support;
      std::cerr << "fit residual " << format_exact(polar.fit_residual) << ", identity residual "
                << format_exact(centro_affine_identity_residual(*transform, body, polar.support)) << '\n';
      emit(flags, "polar", out);
    } else if (norm_cmd->parsed()) {
      const SlNormalized n = sl_normalize(*transform, body);
      out.support = n.support;
      const auto& m = n.map.matrix();
      for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) out.map.push_back(m(i, j));
      }
      std::cerr << "distance to ball " << format_exact(distance_to_ball(*transform, n.support)) << '\n';
      emit(flags, "normalized", out);
    } else {
      out.support = body;
      emit(flags, "shape", out);
    }
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InvalidArgument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitConfig;
  } catch (const RejectionExhausted& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitConfig;
  } catch (const StepFailure& e) {
    std::cerr << "step failure: " << e.what() << '\n';
    return kExitStepFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}
