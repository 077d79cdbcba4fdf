#include "centroflow/shapes.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <random>
#include <sstream>

#include "centroflow/errors.hpp"
#include "centroflow/geometry.hpp"
#include "centroflow/normalization.hpp"

namespace centroflow {

namespace {

constexpr int kMaxDraws = 1000;

std::vector<double> parse_arguments(const std::string& text, std::size_t open) {
  std::vector<double> out;
  const std::size_t close = text.find(')', open);
  if (close == std::string::npos || close + 1 != text.size()) throw ConfigError("shape: missing ')' in '" + text + "'");
  std::stringstream ss(text.substr(open + 1, close - open - 1));
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw ConfigError("shape: bad number '" + item + "' in '" + text + "'");
    }
    if (item.find_first_not_of(" \t", used) != std::string::npos) {
      throw ConfigError("shape: bad number '" + item + "' in '" + text + "'");
    }
    out.push_back(v);
  }
  return out;
}

// Shortest text that reads back to the same double.
std::string format_number(double v) {
  char buf[32];
  return std::string(buf, std::to_chars(buf, buf + sizeof buf, v).ptr);
}

}  // namespace

ShapeSpec parse_shape(const std::string& text, std::uint64_t default_seed) {
  const std::size_t open = text.find('(');
  const std::string name = text.substr(0, open);
  const std::vector<double> args = open == std::string::npos ? std::vector<double>{} : parse_arguments(text, open);
  ShapeSpec spec;
  if (name == "ball") {
    if (args.size() > 1) throw ConfigError("shape: ball takes one radius");
    if (!args.empty()) spec.radius = args[0];
    if (!(spec.radius > 0.0)) throw ConfigError("shape: ball radius must be positive");
  } else if (name == "ellipsoid") {
    spec.kind = ShapeSpec::Kind::ellipsoid;
    if (args.size() < 2 || args.size() > 3) throw ConfigError("shape: ellipsoid takes 2 or 3 semi-axes");
    for (double a : args) {
      if (!(a > 0.0)) throw ConfigError("shape: semi-axes must be positive");
    }
    spec.axes = args;
  } else if (name == "random") {
    spec.kind = ShapeSpec::Kind::random;
    if (args.size() > 3) throw ConfigError("shape: random takes at most (seed, amplitude, max_degree)");
    spec.seed = default_seed;
    if (args.size() > 0) {
      if (args[0] < 0.0 || args[0] != std::floor(args[0])) throw ConfigError("shape: seed must be a non-negative integer");
      spec.seed = static_cast<std::uint64_t>(args[0]);
    }
    if (args.size() > 1) spec.amplitude = args[1];
    if (args.size() > 2) {
      if (args[2] != std::floor(args[2])) throw ConfigError("shape: max_degree must be an integer");
      spec.max_degree = static_cast<int>(args[2]);
    }
    if (!(spec.amplitude >= 0.0)) throw ConfigError("shape: amplitude must be >= 0");
    if (spec.max_degree < 0) throw ConfigError("shape: max_degree must be >= 0");
  } else {
    throw ConfigError("shape: unknown kind '" + name + "' (ball, ellipsoid, random)");
  }
  return spec;
}

std::string to_string(const ShapeSpec& spec) {
  switch (spec.kind) {
    case ShapeSpec::Kind::ball: return "ball(" + format_number(spec.radius) + ")";
    case ShapeSpec::Kind::ellipsoid: {
      std::string s = "ellipsoid(";
      for (std::size_t i = 0; i < spec.axes.size(); ++i) s += (i ? "," : "") + format_number(spec.axes[i]);
      return s + ")";
    }
    case ShapeSpec::Kind::random:
      return "random(" + std::to_string(spec.seed) + "," + format_number(spec.amplitude) + "," +
             std::to_string(spec.max_degree) + ")";
  }
  return "";
}

double unit_uniform(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

Spectrum make_shape(const SphericalTransform& transform, const ShapeSpec& spec) {
  const int n = transform.dimension();
  Spectrum s(n, transform.lmax());
  const double area = transform.grid().area();
  switch (spec.kind) {
    case ShapeSpec::Kind::ball:
      if (!(spec.radius > 0.0)) throw InvalidArgument("ball radius must be positive");
      s[0] = spec.radius * std::sqrt(area);
      return s;
    case ShapeSpec::Kind::ellipsoid: {
      if (spec.axes.size() != static_cast<std::size_t>(n + 1)) {
        throw InvalidArgument("ellipsoid needs " + std::to_string(n + 1) + " semi-axes in dimension " + std::to_string(n));
      }
      s[0] = std::sqrt(area);
      return transform_support(transform, s, LinearMap::diagonal(spec.axes));
    }
    case ShapeSpec::Kind::random: {
      if (spec.max_degree > transform.lmax()) throw InvalidArgument("random shape degree exceeds lmax");
      std::mt19937_64 rng(spec.seed);
      for (int draw = 0; draw < kMaxDraws; ++draw) {
        s = Spectrum(n, transform.lmax());
        s[0] = std::sqrt(area);
        for (std::size_t i = 1; i < s.size(); ++i) {
          const int l = s.degree(i);
          if (l % 2 || l > spec.max_degree) continue;
          s[i] = spec.amplitude * (2.0 * unit_uniform(rng()) - 1.0) / (l * l);
        }
        try {
          const CurvatureBundle b = curvature_bundle(transform, s);
          if (*std::min_element(b.support.begin(), b.support.end()) > 0.0) return s;
        } catch (const ConvexityViolation&) {
        }
      }
      throw RejectionExhausted("no convex body in " + std::to_string(kMaxDraws) + " draws for " + to_string(spec));
    }
  }
  return s;
}

}  // namespace centroflow
