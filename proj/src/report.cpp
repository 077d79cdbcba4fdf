#include "centroflow/report.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <json.hpp>
#include <ostream>

#include "centroflow/errors.hpp"

namespace centroflow {

std::string format_exact(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> columns = {
      "t",      "dt",        "V",         "omega_p",   "ratio",     "deficit",   "s_min",      "s_max",       "r_minus",
      "r_plus", "K_min",     "K_max",     "kappa_min", "kappa_max", "dist_ball", "odd_energy", "tail_energy", "sl_applied"};
  return columns;
}

void write_csv_header(std::ostream& out) {
  const auto& c = csv_columns();
  for (std::size_t i = 0; i < c.size(); ++i) out << (i ? "," : "") << c[i];
  out << '\n';
}

void write_csv_row(std::ostream& out, const DiagnosticsRecord& r) {
  const double values[] = {r.t,       r.dt,      r.volume,    r.omega_p,   r.ratio,     r.deficit,
                           r.s_min,   r.s_max,   r.r_minus,   r.r_plus,    r.gauss_min, r.gauss_max,
                           r.kappa_min, r.kappa_max, r.dist_ball, r.odd_energy, r.tail_energy};
  for (double v : values) out << format_exact(v) << ',';
  out << (r.sl_applied ? 1 : 0) << '\n';
}

void write_csv(std::ostream& out, const std::vector<DiagnosticsRecord>& records) {
  write_csv_header(out);
  for (const auto& r : records) write_csv_row(out, r);
}

std::string record_violation(const DiagnosticsRecord& r) {
  const std::pair<const char*, double> positive[] = {{"K_min", r.gauss_min},     {"K_max", r.gauss_max},
                                                     {"kappa_min", r.kappa_min}, {"kappa_max", r.kappa_max},
                                                     {"s_min", r.s_min},         {"V", r.volume}};
  for (const auto& [name, v] : positive) {
    if (!(v > 0.0) || !std::isfinite(v)) return std::string(name) + " = " + format_exact(v) + " is not positive and finite";
  }
  if (!(r.deficit >= -1e-8)) return "deficit = " + format_exact(r.deficit) + " is below -1e-8";
  return "";
}

void write_coefficients(std::ostream& out, const CoefficientFile& f) {
  const Spectrum& s = f.support;
  out << "{\n  \"dimension\": " << s.dimension() << ",\n  \"lmax\": " << s.lmax() << ",\n  \"t\": " << format_exact(f.t)
      << ",\n  \"map\": [";
  for (std::size_t i = 0; i < f.map.size(); ++i) out << (i ? ", " : "") << format_exact(f.map[i]);
  out << "],\n  \"coefficients\": [";
  bool first = true;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == 0.0) continue;
    out << (first ? "\n" : ",\n") << "    [" << s.degree(i) << ", " << s.order(i) << ", " << format_exact(s[i]) << "]";
    first = false;
  }
  out << (first ? "]\n}\n" : "\n  ]\n}\n");
}

void write_coefficients(std::ostream& out, const Snapshot& snapshot) {
  CoefficientFile f;
  f.t = snapshot.t;
  f.support = snapshot.support;
  for (Eigen::Index i = 0; i < snapshot.map.rows(); ++i) {
    for (Eigen::Index j = 0; j < snapshot.map.cols(); ++j) f.map.push_back(snapshot.map(i, j));
  }
  write_coefficients(out, f);
}

CoefficientFile read_coefficients(std::istream& in) {
  CoefficientFile f;
  try {
    const nlohmann::json j = nlohmann::json::parse(in);
    const int n = j.at("dimension").get<int>();
    const int lmax = j.at("lmax").get<int>();
    if (n != 1 && n != 2) throw ConfigError("coefficients: dimension must be 1 or 2");
    if (lmax < 0) throw ConfigError("coefficients: lmax must be >= 0");
    f.support = Spectrum(n, lmax);
    f.t = j.value("t", 0.0);
    if (j.contains("map")) f.map = j.at("map").get<std::vector<double>>();
    for (const auto& c : j.at("coefficients")) {
      const int l = c.at(0).get<int>(), m = c.at(1).get<int>();
      if (l < 0 || l > lmax || (n == 1 ? (l > 0 && std::abs(m) != l) || (l == 0 && m != 0) : std::abs(m) > l)) {
        throw ConfigError("coefficients: invalid (degree, order) = (" + std::to_string(l) + ", " + std::to_string(m) + ")");
      }
      f.support.at(l, m) = c.at(2).get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("coefficients: ") + e.what());
  }
  return f;
}

void write_summary(std::ostream& out, const RunConfig& config, const RunResult& result) {
  const auto& rec = result.series.records;
  nlohmann::ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["status"] = to_string(result.status);
  if (!result.message.empty()) j["message"] = result.message;
  j["dimension"] = config.flow.dimension;
  j["p"] = config.flow.p;
  j["lmax"] = config.flow.lmax;
  j["shape"] = to_string(config.shape_spec());
  j["warnings"] = config.flow.warnings();
  j["accepted_steps"] = result.final_state.accepted;
  j["rejected_steps"] = result.final_state.rejected;
  j["records"] = rec.size();
  j["final_time"] = result.final_state.time;
  if (!rec.empty()) {
    j["initial_deficit"] = rec.front().deficit;
    j["final_deficit"] = rec.back().deficit;
    j["final_dist_ball"] = rec.back().dist_ball;
    double worst = 0.0;
    for (std::size_t i = 1; i < rec.size(); ++i) {
      worst = std::min(worst, (rec[i].ratio_pre_sl - rec[i - 1].ratio) / rec[i - 1].ratio);
    }
    j["worst_relative_ratio_change"] = worst;
    std::size_t violations = 0;
    for (const auto& r : rec) violations += record_violation(r).empty() ? 0 : 1;
    j["record_violations"] = violations;
  }
  out << j.dump(2) << '\n';
}

}  // namespace centroflow
