#include "centroflow/config.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <ostream>
#include <set>
#include <sstream>

#include "centroflow/errors.hpp"

namespace centroflow {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  errno = 0;
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (v.empty() || *end != '\0' || errno == ERANGE || std::isnan(d)) {
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  }
  return d;
}

long long to_integer(const std::string& key, const std::string& v) {
  errno = 0;
  char* end = nullptr;
  const long long i = std::strtoll(v.c_str(), &end, 10);
  if (v.empty() || *end != '\0' || errno == ERANGE) throw ConfigError(key + ": expected an integer, got '" + v + "'");
  return i;
}

int to_int(const std::string& key, const std::string& v) {
  const long long i = to_integer(key, v);
  if (i < -2147483647LL || i > 2147483647LL) throw ConfigError(key + ": out of range");
  return static_cast<int>(i);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

// Shortest text that reads back to the same double.
std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  return std::string(buf, std::to_chars(buf, buf + sizeof buf, v).ptr);
}

struct Field {
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

const std::vector<std::pair<std::string, Field>>& fields() {
  static const std::vector<std::pair<std::string, Field>> table = {
      {"schema_version",
       {[](RunConfig& c, const std::string& v) { c.schema_version = to_int("schema_version", v); },
        [](const RunConfig& c) { return std::to_string(c.schema_version); }}},
      {"dimension",
       {[](RunConfig& c, const std::string& v) { c.flow.dimension = to_int("dimension", v); },
        [](const RunConfig& c) { return std::to_string(c.flow.dimension); }}},
      {"p", {[](RunConfig& c, const std::string& v) { c.flow.p = to_double("p", v); },
             [](const RunConfig& c) { return format_double(c.flow.p); }}},
      {"lmax", {[](RunConfig& c, const std::string& v) { c.flow.lmax = to_int("lmax", v); },
                [](const RunConfig& c) { return std::to_string(c.flow.lmax); }}},
      {"resolution",
       {[](RunConfig& c, const std::string& v) {
          c.flow.resolution.clear();
          std::stringstream ss(v);
          std::string item;
          while (std::getline(ss, item, ',')) {
            const std::string t = trim(item);
            if (!t.empty()) c.flow.resolution.push_back(to_int("resolution", t));
          }
        },
        [](const RunConfig& c) {
          std::string s;
          for (std::size_t i = 0; i < c.flow.resolution.size(); ++i) {
            s += (i ? "," : "") + std::to_string(c.flow.resolution[i]);
          }
          return s;
        }}},
      {"dt_safety",
       {[](RunConfig& c, const std::string& v) { c.flow.dt_safety = to_double("dt_safety", v); },
        [](const RunConfig& c) { return format_double(c.flow.dt_safety); }}},
      {"fixed_dt",
       {[](RunConfig& c, const std::string& v) { c.flow.fixed_dt = to_double("fixed_dt", v); },
        [](const RunConfig& c) { return format_double(c.flow.fixed_dt); }}},
      {"max_steps",
       {[](RunConfig& c, const std::string& v) { c.flow.max_steps = static_cast<long>(to_integer("max_steps", v)); },
        [](const RunConfig& c) { return std::to_string(c.flow.max_steps); }}},
      {"horizon",
       {[](RunConfig& c, const std::string& v) { c.flow.horizon = to_double("horizon", v); },
        [](const RunConfig& c) { return format_double(c.flow.horizon); }}},
      {"normalize_volume",
       {[](RunConfig& c, const std::string& v) { c.flow.normalize_volume = to_bool("normalize_volume", v); },
        [](const RunConfig& c) { return std::string(c.flow.normalize_volume ? "true" : "false"); }}},
      {"sl_every",
       {[](RunConfig& c, const std::string& v) { c.flow.sl_every = to_int("sl_every", v); },
        [](const RunConfig& c) { return std::to_string(c.flow.sl_every); }}},
      {"sl_ratio_trigger",
       {[](RunConfig& c, const std::string& v) { c.flow.sl_ratio_trigger = to_double("sl_ratio_trigger", v); },
        [](const RunConfig& c) { return format_double(c.flow.sl_ratio_trigger); }}},
      {"sl_contact_tolerance",
       {[](RunConfig& c, const std::string& v) { c.flow.sl_contact_tolerance = to_double("sl_contact_tolerance", v); },
        [](const RunConfig& c) { return format_double(c.flow.sl_contact_tolerance); }}},
      {"convexity_floor",
       {[](RunConfig& c, const std::string& v) { c.flow.convexity_floor = to_double("convexity_floor", v); },
        [](const RunConfig& c) { return format_double(c.flow.convexity_floor); }}},
      {"stop_deficit",
       {[](RunConfig& c, const std::string& v) { c.flow.stop_deficit = to_double("stop_deficit", v); },
        [](const RunConfig& c) { return format_double(c.flow.stop_deficit); }}},
      {"stop_volume",
       {[](RunConfig& c, const std::string& v) { c.flow.stop_volume = to_double("stop_volume", v); },
        [](const RunConfig& c) { return format_double(c.flow.stop_volume); }}},
      {"snapshot_every",
       {[](RunConfig& c, const std::string& v) { c.flow.snapshot_every = to_int("snapshot_every", v); },
        [](const RunConfig& c) { return std::to_string(c.flow.snapshot_every); }}},
      {"seed",
       {[](RunConfig& c, const std::string& v) {
          const long long s = to_integer("seed", v);
          if (s < 0) throw ConfigError("seed: must be >= 0");
          c.flow.seed = static_cast<std::uint64_t>(s);
        },
        [](const RunConfig& c) { return std::to_string(c.flow.seed); }}},
      {"direction",
       {[](RunConfig& c, const std::string& v) {
          if (v == "contracting") {
            c.flow.direction = FlowDirection::contracting;
          } else if (v == "expanding") {
            c.flow.direction = FlowDirection::expanding;
          } else {
            throw ConfigError("direction: expected contracting or expanding, got '" + v + "'");
          }
        },
        [](const RunConfig& c) {
          return std::string(c.flow.direction == FlowDirection::contracting ? "contracting" : "expanding");
        }}},
      {"shape", {[](RunConfig& c, const std::string& v) { c.shape = v; }, [](const RunConfig& c) { return c.shape; }}},
      {"output_dir",
       {[](RunConfig& c, const std::string& v) { c.output_dir = v; }, [](const RunConfig& c) { return c.output_dir; }}},
  };
  return table;
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& f : fields()) k.push_back(f.first);
    return k;
  }();
  return keys;
}

void set_config_value(RunConfig& config, const std::string& key, const std::string& value) {
  for (const auto& [name, field] : fields()) {
    if (name == key) {
      field.set(config, value);
      return;
    }
  }
  throw ConfigError("unknown key '" + key + "'");
}

void RunConfig::validate() const {
  if (schema_version != kSchemaVersion) {
    throw ConfigError("schema_version " + std::to_string(schema_version) + " is not supported (expected " +
                      std::to_string(kSchemaVersion) + ")");
  }
  flow.validate();
  const ShapeSpec spec = shape_spec();
  if (spec.kind == ShapeSpec::Kind::ellipsoid && spec.axes.size() != static_cast<std::size_t>(flow.dimension + 1)) {
    throw ConfigError("shape: ellipsoid needs " + std::to_string(flow.dimension + 1) + " semi-axes");
  }
  if (spec.kind == ShapeSpec::Kind::random && spec.max_degree > flow.lmax) {
    throw ConfigError("shape: random max_degree exceeds lmax");
  }
  if (output_dir.empty()) throw ConfigError("output_dir must not be empty");
}

RunConfig parse_config(std::istream& in) {
  RunConfig config;
  std::set<std::string> seen;
  std::string line;
  for (int number = 1; std::getline(in, line); ++number) {
    const std::string body = trim(line.substr(0, line.find('#')));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    const std::string where = "line " + std::to_string(number) + ": ";
    if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (!seen.insert(key).second) throw ConfigError(where + "duplicate key '" + key + "'");
    try {
      set_config_value(config, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
  if (!seen.count("schema_version")) throw ConfigError("missing schema_version");
  config.validate();
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

void write_config(std::ostream& out, const RunConfig& config) {
  for (const auto& [name, field] : fields()) out << name << " = " << field.get(config) << '\n';
}

}  // namespace centroflow
