#pragma once

// Unimodular normalization of centrally symmetric bodies: minimum-volume
// centered ellipsoids, linear images of support functions and distance to
// the unit ball.

#include <Eigen/Dense>
#include <span>

#include "centroflow/sphere.hpp"

namespace centroflow {

/// Invertible linear map of R^{n+1}.
class LinearMap {
 public:
  explicit LinearMap(Eigen::MatrixXd matrix);
  static LinearMap identity(int dimension);
  static LinearMap diagonal(std::span<const double> entries);

  const Eigen::MatrixXd& matrix() const noexcept { return matrix_; }
  double determinant() const noexcept { return determinant_; }
  int dimension() const noexcept { return static_cast<int>(matrix_.rows()) - 1; }
  bool unimodular(double tolerance = 1e-10) const { return std::abs(determinant_ - 1.0) <= tolerance; }

 private:
  Eigen::MatrixXd matrix_;
  double determinant_;
};

struct LownerOptions {
  double tolerance = 1e-10;     // duality gap of the barrier problem, in log det units
  long max_iterations = 2000;   // Newton steps
  double max_condition = 1e10;  // DegenerateSpan threshold for the sample second moment
  double contact_tolerance = 1e-12;  // body variant: stop once refined contacts satisfy x^T M x <= 1 + tol
};

/// Minimum-volume centered ellipsoid E = {x : x^T M x <= 1} containing the points.
struct LownerEllipsoid {
  Eigen::MatrixXd shape;       // M, symmetric positive definite
  double optimality_gap = 0;   // upper bound on vol(E)/vol(E_opt) - 1
  long iterations = 0;
};

/// Log-det barrier method on the (n+1)(n+2)/2 entries of M, after whitening
/// the points by their second moment. The result is scaled so that every
/// point satisfies x^T M x <= 1.
LownerEllipsoid lowner_ellipsoid(std::span<const Vec3> points, int dimension, const LownerOptions& options = {});

/// Loewner ellipsoid of the body with support function s: boundary samples on
/// the grid, refined near the contact points by local maximization of x^T M x.
LownerEllipsoid lowner_ellipsoid(const SphericalTransform& transform, const Spectrum& support,
                                 const LownerOptions& options = {});

/// Support function of A(K): s_{AK}(u) = |A^T u| s(A^T u / |A^T u|), refit
/// on the transform grid and projected to even degrees.
Spectrum transform_support(const SphericalTransform& transform, const Spectrum& support, const LinearMap& map);

/// Rescale so the body has the volume of the unit ball.
Spectrum normalize_volume(const SphericalTransform& transform, const Spectrum& support);

struct SlNormalized {
  Spectrum support;
  LinearMap map;
};

/// Volume-normalize, then map the Loewner ellipsoid of the boundary samples to
/// a ball with the unimodular map det(M^{1/2})^{-1/(n+1)} M^{1/2}.
SlNormalized sl_normalize(const SphericalTransform& transform, const Spectrum& support,
                          const LownerOptions& options = {});

/// max_k |s(z_k) - 1| after volume normalization.
double distance_to_ball(const SphericalTransform& transform, const Spectrum& support);

}  // namespace centroflow
