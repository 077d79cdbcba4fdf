#pragma once

// File-backed run configuration: flat "key = value" lines with an explicit
// schema version. Unknown or repeated keys are errors.

#include <iosfwd>
#include <string>
#include <vector>

#include "centroflow/flow.hpp"
#include "centroflow/shapes.hpp"

namespace centroflow {

inline constexpr int kSchemaVersion = 1;

struct RunConfig {
  int schema_version = kSchemaVersion;
  FlowConfig flow;
  std::string shape = "random";
  std::string output_dir = ".";

  /// Shape spec with the configured seed as the default for random shapes.
  ShapeSpec shape_spec() const { return parse_shape(shape, flow.seed); }
  /// Throws ConfigError.
  void validate() const;
};

/// Names of all accepted keys, in the order write_config emits them.
const std::vector<std::string>& config_keys();

/// Blank lines and text after '#' are ignored. `schema_version` must be
/// present and equal kSchemaVersion. Throws ConfigError with the line number.
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);

/// Assigns one key; used by the parser and by command-line overrides.
void set_config_value(RunConfig& config, const std::string& key, const std::string& value);

/// Every key, one per line, in a form parse_config reads back exactly.
void write_config(std::ostream& out, const RunConfig& config);

}  // namespace centroflow
