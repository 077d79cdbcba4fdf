#pragma once

// Closed-form bodies shared by the test binaries.

#include <cmath>
#include <random>

#include "centroflow/sphere.hpp"

namespace testing_support {

using centroflow::Spectrum;
using centroflow::SphericalTransform;

/// Support function of the centered ellipsoid with the given semi-axes,
/// sampled exactly on the grid and fitted.
inline Spectrum ellipsoid(const SphericalTransform& t, double a, double b, double c = 1.0) {
  const auto& g = t.grid();
  std::vector<double> v(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    const auto& z = g.node(k);
    v[k] = std::sqrt(a * a * z[0] * z[0] + b * b * z[1] * z[1] + c * c * z[2] * z[2]);
  }
  return centroflow::project_even(t.analyze(v));
}

inline Spectrum ball(const SphericalTransform& t, double radius = 1.0) {
  Spectrum s(t.dimension(), t.lmax());
  s[0] = radius * std::sqrt(t.grid().area());
  return s;
}

/// 1 + coefficient * B, with B the orthonormal cosine (n = 1) or zonal (n = 2)
/// basis function of the given degree.
inline Spectrum perturbed_ball(const SphericalTransform& t, double coefficient, int degree) {
  Spectrum s = ball(t);
  s.at(degree, t.dimension() == 1 ? degree : 0) = coefficient;
  return s;
}

/// Small random even perturbation of the unit ball (convex for amplitude <~ 0.05).
inline Spectrum random_body(const SphericalTransform& t, unsigned seed, double amplitude = 0.03, int max_degree = 6) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-amplitude, amplitude);
  Spectrum s = ball(t);
  for (std::size_t i = 1; i < s.size(); ++i) {
    const int l = s.degree(i);
    if (l % 2 == 0 && l <= max_degree) s[i] = u(rng) / (l * l);
  }
  return s;
}

}  // namespace testing_support
