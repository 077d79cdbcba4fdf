#pragma once

// Curvature and integral functionals of a convex body given by its support
// function on S^n.

#include <vector>

#include "centroflow/sphere.hpp"

namespace centroflow {

/// Volume of the unit ball in R^{n+1}: pi (n = 1) or 4 pi / 3 (n = 2).
double unit_ball_volume(int dimension);

/// Upper bound of the p-affine isoperimetric ratio, attained by centered
/// ellipsoids: (n+1)^{n+p+1} omega_{n+1}^{2p}.
double isoperimetric_bound(int dimension, double p);

/// Exponent p / (n + 1 + p) applied to the centro-affine curvature.
inline double centro_affine_exponent(int dimension, double p) { return p / (dimension + 1.0 + p); }

/// Per-node curvature data derived from the support function.
struct CurvatureBundle {
  int dimension = 0;
  ScalarField support;         // s
  VectorField gradient;        // grad s
  SymTensorField radii;        // r_ij = hess s + s delta_ij
  ScalarField det_radii;       // S_n = det r, reciprocal Gauss curvature
  ScalarField gauss;           // K = 1 / S_n
  std::vector<double> eigen;   // principal radii lambda_i, ascending, n per node
  std::vector<double> kappa;   // principal curvatures 1 / lambda_i, n per node
  ScalarField mean;            // H = sum kappa_i
  ScalarField centro_affine;   // K_0 = K / s^{n+2}

  std::size_t size() const noexcept { return support.size(); }
  double min_radius() const;
  double max_radius() const;
};

/// Builds the bundle from a synthesized jet. Throws ConvexityViolation when
/// some principal radius is <= convexity_floor * (largest principal radius).
CurvatureBundle curvature_bundle(const FieldJet& jet, double convexity_floor = 1e-8);
CurvatureBundle curvature_bundle(const SphericalTransform& transform, const Spectrum& support,
                                 double convexity_floor = 1e-8);

/// Curvature data at one direction from a point jet (r, S_n, K_0); no
/// convexity check.
struct PointCurvature {
  double support = 0.0;
  double det_radii = 0.0;
  double centro_affine = 0.0;
  Vec3 boundary_point{};
};
PointCurvature point_curvature(const Spectrum& support, const Vec3& direction);

/// Boundary point with outer normal z: x(z) = s(z) z + grad s(z).
std::vector<Vec3> embedding(const SphericalGrid& grid, const FieldJet& jet);
std::vector<Vec3> embedding(const SphericalTransform& transform, const Spectrum& support);

/// V = (1/(n+1)) * integral of s S_n.
double volume(const SphericalGrid& grid, const CurvatureBundle& bundle);
double volume(const SphericalTransform& transform, const Spectrum& support);

/// Omega_p = integral of (s / K) (K / s^{n+2})^{p/(n+1+p)}.
double p_affine_area(const SphericalGrid& grid, const CurvatureBundle& bundle, double p);
double p_affine_area(const SphericalTransform& transform, const Spectrum& support, double p);

struct IsoperimetricRatio {
  double ratio = 0.0;    // Omega_p^{n+p+1} / V^{n+1-p}
  double deficit = 0.0;  // 1 - ratio / bound
};
IsoperimetricRatio isoperimetric_ratio(int dimension, double volume, double p_area, double p);
IsoperimetricRatio isoperimetric_ratio(const SphericalTransform& transform, const Spectrum& support, double p);

struct RadiusPair {
  double inner = 0.0;  // min s
  double outer = 0.0;  // max |x|
};
RadiusPair inner_outer_radius(const CurvatureBundle& bundle);
RadiusPair inner_outer_radius(const SphericalTransform& transform, const Spectrum& support);

/// Scalar summary of a body for one exponent p.
struct BodyMetrics {
  double volume = 0.0;
  double p_area = 0.0;
  double ratio = 0.0;
  double deficit = 0.0;
  double r_minus = 0.0;
  double r_plus = 0.0;
};
BodyMetrics body_metrics(const SphericalGrid& grid, const CurvatureBundle& bundle, double p);

}  // namespace centroflow
