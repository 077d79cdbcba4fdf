#pragma once

// Polar bodies, the pairing of centro-affine curvatures of K and K°, and the
// right-hand side of the expanding flow satisfied by the polar.

#include <vector>

#include "centroflow/sphere.hpp"

namespace centroflow {

/// Radial function of K, rho(u) = min over <z,u> > 0 of s(z) / <z,u>.
///
/// Starts from the grid node whose boundary point points closest to u and
/// runs damped Newton on P_{u-perp} x(z) = 0 (20 iterations at most).
class RadialFunction {
 public:
  RadialFunction(const SphericalTransform& transform, const Spectrum& support);
  double operator()(const Vec3& u) const;
  /// Normal direction z at which x(z) is parallel to u.
  Vec3 contact_normal(const Vec3& u) const;

 private:
  const Spectrum& support_;
  const SphericalGrid& grid_;
  std::vector<Vec3> directions_;  // x(z_k) / |x(z_k)|
};

double radial_function(const SphericalTransform& transform, const Spectrum& support, const Vec3& u);

struct PolarSupport {
  Spectrum support;
  double fit_residual = 0.0;  // max over nodes of |fitted - exact| polar values
};

/// s°(u) = 1 / rho_K(u) on the grid, fitted and projected to even degrees.
/// Throws ConvexityViolation when the fitted polar is not strictly convex.
PolarSupport polar_support(const SphericalTransform& transform, const Spectrum& support);

/// max_k |K0(z_k) K0°(u_k) - 1| with x°(z) = z / s(z) and u = x(z) / |x(z)|;
/// K0° is evaluated off-grid from the fitted polar.
double centro_affine_identity_residual(const SphericalTransform& transform, const Spectrum& support,
                                       const Spectrum& polar);
double centro_affine_identity_residual(const SphericalTransform& transform, const Spectrum& support);

/// +s° (K0°)^{-p/(n+1+p)} at the grid nodes.
ScalarField dual_flow_rhs(const SphericalTransform& transform, const Spectrum& polar, double p);

}  // namespace centroflow
