#pragma once

// Initial bodies: balls, centered ellipsoids and random smooth symmetric bodies.

#include <cstdint>
#include <string>
#include <vector>

#include "centroflow/sphere.hpp"

namespace centroflow {

struct ShapeSpec {
  enum class Kind { ball, ellipsoid, random };
  Kind kind = Kind::ball;
  double radius = 1.0;        // ball
  std::vector<double> axes;   // ellipsoid semi-axes, n + 1 of them
  std::uint64_t seed = 0;     // random
  double amplitude = 0.1;     // random
  int max_degree = 8;         // random
};

/// Parses "ball", "ball(r)", "ellipsoid(a,b[,c])", "random", "random(seed)",
/// "random(seed,amplitude)" or "random(seed,amplitude,max_degree)".
/// Throws ConfigError.
ShapeSpec parse_shape(const std::string& text, std::uint64_t default_seed = 0);
std::string to_string(const ShapeSpec& spec);

/// Uniform double in [0, 1) from the top 53 bits of a 64-bit draw; the same
/// sequence on every platform.
double unit_uniform(std::uint64_t bits);

/// Support function of the shape on the transform's grid.
///
/// random: s = 1 + sum over even degrees 2..max_degree and all orders of
/// c_lm Y_lm with c_lm uniform in [-amplitude, amplitude] / l^2 (orthonormal
/// basis), redrawn until strictly convex. Throws RejectionExhausted after
/// 1000 draws, InvalidArgument on malformed parameters.
Spectrum make_shape(const SphericalTransform& transform, const ShapeSpec& spec);

}  // namespace centroflow
