#pragma once

// Discretization of S^1 and S^2: quadrature grids, real spectral bases,
// analysis/synthesis and spectral covariant derivatives.
//
// Basis conventions (all orthonormal in L^2 of the sphere):
//   n = 1: (0,0) -> 1/sqrt(2 pi); (l,+l) -> cos(l t)/sqrt(pi); (l,-l) -> sin(l t)/sqrt(pi)
//   n = 2: (l,m) -> Pbar_l^|m|(cos theta) * {1/sqrt(2 pi), cos(m phi)/sqrt(pi), sin(|m| phi)/sqrt(pi)}
//          where Pbar is orthonormal on [-1,1] without the Condon-Shortley phase.
// Tangent frames: n = 1 uses d/dt; n = 2 uses (d/dtheta, d/dphi / sin theta).

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace centroflow {

using Vec3 = std::array<double, 3>;

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

/// Quadrature nodes, weights and tangent frames on S^n, n in {1, 2}.
///
/// For n = 1 the nodes are equispaced angles; for n = 2 Gauss-Legendre
/// latitudes times equispaced longitudes, stored latitude-major.
/// Points of S^1 are embedded in the first two components of a Vec3.
class SphericalGrid {
 public:
  int dimension() const noexcept { return dimension_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  int latitudes() const noexcept { return latitudes_; }
  int longitudes() const noexcept { return longitudes_; }

  const Vec3& node(std::size_t k) const { return nodes_[k]; }
  double weight(std::size_t k) const { return weights_[k]; }
  const Vec3& tangent(std::size_t k, int i) const { return frames_[k][static_cast<std::size_t>(i)]; }

  std::span<const Vec3> nodes() const noexcept { return nodes_; }
  std::span<const double> weights() const noexcept { return weights_; }

  /// Gauss-Legendre abscissae cos(theta_i) and weights (n = 2 only).
  std::span<const double> latitude_cosines() const noexcept { return lat_cos_; }
  std::span<const double> latitude_sines() const noexcept { return lat_sin_; }
  std::span<const double> latitude_weights() const noexcept { return lat_w_; }

  /// Surface area of S^n: 2 pi or 4 pi.
  double area() const noexcept;

  /// Largest degree L such that products of two basis functions of degree <= L
  /// are integrated exactly.
  int max_degree() const noexcept;

  friend SphericalGrid build_grid(int dimension, std::span<const int> resolution);

 private:
  SphericalGrid() = default;

  int dimension_ = 0;
  int latitudes_ = 0;
  int longitudes_ = 0;
  std::vector<Vec3> nodes_;
  std::vector<double> weights_;
  std::vector<std::array<Vec3, 2>> frames_;
  std::vector<double> lat_cos_, lat_sin_, lat_w_;
};

/// Build a grid. `resolution` is {nodes} for n = 1 and {latitudes, longitudes}
/// for n = 2. Throws InvalidArgument for n outside {1, 2} or a resolution
/// below the minimum (n = 1: 4 nodes; n = 2: 2 latitudes, 4 longitudes).
SphericalGrid build_grid(int dimension, std::span<const int> resolution);

/// Grid obeying the 3/2 dealiasing rule for truncation degree `lmax`, with
/// symmetric node sets (n = 1: node count a multiple of 4; n = 2: even longitude count).
SphericalGrid grid_for_degree(int dimension, int lmax);

/// Real basis coefficients up to degree lmax.
class Spectrum {
 public:
  Spectrum() = default;
  Spectrum(int dimension, int lmax);

  int dimension() const noexcept { return dimension_; }
  int lmax() const noexcept { return lmax_; }
  std::size_t size() const noexcept { return values_.size(); }

  static std::size_t count(int dimension, int lmax);
  static std::size_t index(int dimension, int degree, int order);
  std::size_t index(int degree, int order) const { return index(dimension_, degree, order); }
  int degree(std::size_t i) const;
  int order(std::size_t i) const;

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& at(int degree, int order) { return values_[index(degree, order)]; }
  double at(int degree, int order) const { return values_[index(degree, order)]; }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  Spectrum& operator+=(const Spectrum& other);
  Spectrum& operator-=(const Spectrum& other);
  Spectrum& operator*=(double factor);
  /// this += factor * other
  Spectrum& add_scaled(double factor, const Spectrum& other);

  /// Copy with a different truncation degree (zero padded or truncated).
  Spectrum resized(int lmax) const;

  /// Sum of squared coefficients over odd degrees.
  double odd_energy() const;
  /// Fraction of the energy carried by degrees above `fraction * lmax`.
  double tail_energy(double fraction = 0.9) const;

 private:
  int dimension_ = 0;
  int lmax_ = 0;
  std::vector<double> values_;
};

Spectrum operator+(Spectrum a, const Spectrum& b);
Spectrum operator-(Spectrum a, const Spectrum& b);
Spectrum operator*(double factor, Spectrum a);

/// Largest absolute coefficient difference; spectra may differ in lmax.
double max_abs_difference(const Spectrum& a, const Spectrum& b);

using ScalarField = std::vector<double>;

/// Per-node tangent vector components in the grid frame.
struct VectorField {
  int dimension = 0;
  std::vector<double> data;  // node-major, `dimension` components per node
  double operator()(std::size_t node, int i) const {
    return data[node * static_cast<std::size_t>(dimension) + static_cast<std::size_t>(i)];
  }
};

/// Per-node symmetric tensor in the grid frame, upper triangle only:
/// n = 1: (11); n = 2: (11, 12, 22).
struct SymTensorField {
  int dimension = 0;
  std::vector<double> data;
  static constexpr int components(int dimension) { return dimension == 1 ? 1 : 3; }
  double operator()(std::size_t node, int i, int j) const;
};

/// Values and first/second covariant derivatives on the grid.
struct FieldJet {
  ScalarField value;
  VectorField gradient;
  SymTensorField hessian;
};

/// Value, frame and covariant derivatives at a single direction.
struct PointJet {
  Vec3 direction{};
  std::array<Vec3, 2> frame{};
  double value = 0.0;
  std::array<double, 2> gradient{};
  std::array<double, 3> hessian{};  // (11, 12, 22); n = 1 uses [0] only
};

class SphericalTransform;

/// Analysis / synthesis pair for a grid and a truncation degree.
///
/// Immutable after construction and safe to share between threads.
class SphericalTransform {
 public:
  /// Throws InvalidArgument when lmax exceeds grid.max_degree() (aliasing guard).
  SphericalTransform(std::shared_ptr<const SphericalGrid> grid, int lmax);
  ~SphericalTransform();
  SphericalTransform(const SphericalTransform&) = delete;
  SphericalTransform& operator=(const SphericalTransform&) = delete;

  /// Shorthand for a dealiased grid at the given degree.
  static std::shared_ptr<const SphericalTransform> for_degree(int dimension, int lmax);

  const SphericalGrid& grid() const noexcept { return *grid_; }
  std::shared_ptr<const SphericalGrid> grid_ptr() const noexcept { return grid_; }
  int dimension() const noexcept { return grid_->dimension(); }
  int lmax() const noexcept { return lmax_; }

  Spectrum analyze(std::span<const double> field) const;
  ScalarField synthesize(const Spectrum& coefficients) const;
  FieldJet synthesize_jet(const Spectrum& coefficients) const;

  struct Impl;

 private:
  void check_spectrum(const Spectrum& c) const;

  std::shared_ptr<const SphericalGrid> grid_;
  int lmax_;
  std::unique_ptr<Impl> impl_;
};

Spectrum analyze(std::span<const double> field, const SphericalTransform& transform);
ScalarField synthesize(const Spectrum& coefficients, const SphericalTransform& transform);
VectorField gradient(const Spectrum& coefficients, const SphericalTransform& transform);
SymTensorField covariant_hessian(const Spectrum& coefficients, const SphericalTransform& transform);

/// Quadrature of a field over S^n.
double integrate(std::span<const double> field, const SphericalGrid& grid);

/// Zero all odd-degree coefficients.
Spectrum project_even(Spectrum coefficients);

/// Exact basis summation at an arbitrary unit vector.
double evaluate_at(const Spectrum& coefficients, const Vec3& direction);

/// Value and covariant derivatives at an arbitrary unit vector, in the same
/// frame convention as the grid (well defined at the poles).
PointJet evaluate_jet(const Spectrum& coefficients, const Vec3& direction);

/// Orthonormal tangent frame at a direction following the grid convention.
std::array<Vec3, 2> tangent_frame(int dimension, const Vec3& direction);

/// Value of basis function (degree, order) at a direction.
double basis_function(int dimension, int degree, int order, const Vec3& direction);

}  // namespace centroflow
