#include "centroflow/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "centroflow/errors.hpp"

namespace centroflow {

double unit_ball_volume(int dimension) {
  if (dimension == 1) return std::numbers::pi;
  if (dimension == 2) return 4.0 * std::numbers::pi / 3.0;
  throw InvalidArgument("unsupported dimension");
}

double isoperimetric_bound(int dimension, double p) {
  const double n = dimension;
  return std::pow(n + 1.0, n + p + 1.0) * std::pow(unit_ball_volume(dimension), 2.0 * p);
}

double CurvatureBundle::min_radius() const { return *std::min_element(eigen.begin(), eigen.end()); }
double CurvatureBundle::max_radius() const { return *std::max_element(eigen.begin(), eigen.end()); }

namespace {

// Eigenvalues of [[a, b], [b, d]], ascending.
std::array<double, 2> sym2_eigen(double a, double b, double d) {
  const double mean = 0.5 * (a + d);
  const double rad = std::hypot(0.5 * (a - d), b);
  return {mean - rad, mean + rad};
}

}  // namespace

CurvatureBundle curvature_bundle(const FieldJet& jet, double convexity_floor) {
  CurvatureBundle b;
  const int n = jet.gradient.dimension;
  const std::size_t count = jet.value.size();
  b.dimension = n;
  b.support = jet.value;
  b.gradient = jet.gradient;
  b.radii = jet.hessian;
  b.det_radii.resize(count);
  b.gauss.resize(count);
  b.eigen.resize(count * static_cast<std::size_t>(n));
  b.kappa.resize(count * static_cast<std::size_t>(n));
  b.mean.resize(count);
  b.centro_affine.resize(count);

  for (std::size_t k = 0; k < count; ++k) {
    const double s = jet.value[k];
    if (n == 1) {
      const double r = jet.hessian.data[k] + s;
      b.radii.data[k] = r;
      b.eigen[k] = r;
      b.det_radii[k] = r;
    } else {
      double* r = &b.radii.data[3 * k];
      r[0] += s;
      r[2] += s;
      const auto ev = sym2_eigen(r[0], r[1], r[2]);
      b.eigen[2 * k] = ev[0];
      b.eigen[2 * k + 1] = ev[1];
      b.det_radii[k] = r[0] * r[2] - r[1] * r[1];
    }
  }

  const double lambda_max = b.max_radius();
  const auto worst = std::min_element(b.eigen.begin(), b.eigen.end());
  if (!(*worst > convexity_floor * lambda_max) || !std::isfinite(lambda_max)) {
    const auto node = static_cast<std::size_t>(worst - b.eigen.begin()) / static_cast<std::size_t>(n);
    std::ostringstream msg;
    msg << "convexity violation: principal radius " << *worst << " at node " << node << " (max " << lambda_max << ")";
    throw ConvexityViolation(msg.str(), *worst, node);
  }

  for (std::size_t k = 0; k < count; ++k) {
    const double s = b.support[k];
    double h = 0.0;
    for (int i = 0; i < n; ++i) {
      const std::size_t idx = k * static_cast<std::size_t>(n) + static_cast<std::size_t>(i);
      b.kappa[idx] = 1.0 / b.eigen[idx];
      h += b.kappa[idx];
    }
    b.mean[k] = h;
    b.gauss[k] = 1.0 / b.det_radii[k];
    b.centro_affine[k] = b.gauss[k] / std::pow(s, n + 2);
  }
  return b;
}

CurvatureBundle curvature_bundle(const SphericalTransform& transform, const Spectrum& support,
                                 double convexity_floor) {
  return curvature_bundle(transform.synthesize_jet(support), convexity_floor);
}

PointCurvature point_curvature(const Spectrum& support, const Vec3& direction) {
  const PointJet j = evaluate_jet(support, direction);
  const int n = support.dimension();
  PointCurvature pc;
  pc.support = j.value;
  if (n == 1) {
    pc.det_radii = j.hessian[0] + j.value;
  } else {
    pc.det_radii = (j.hessian[0] + j.value) * (j.hessian[2] + j.value) - j.hessian[1] * j.hessian[1];
  }
  pc.centro_affine = 1.0 / (pc.det_radii * std::pow(j.value, n + 2));
  for (int c = 0; c < 3; ++c) {
    const auto cc = static_cast<std::size_t>(c);
    pc.boundary_point[cc] = j.value * direction[cc] + j.gradient[0] * j.frame[0][cc];
    if (n == 2) pc.boundary_point[cc] += j.gradient[1] * j.frame[1][cc];
  }
  return pc;
}

std::vector<Vec3> embedding(const SphericalGrid& grid, const FieldJet& jet) {
  const int n = grid.dimension();
  std::vector<Vec3> x(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Vec3& z = grid.node(k);
    for (std::size_t c = 0; c < 3; ++c) {
      double v = jet.value[k] * z[c];
      for (int i = 0; i < n; ++i) v += jet.gradient(k, i) * grid.tangent(k, i)[c];
      x[k][c] = v;
    }
  }
  return x;
}

std::vector<Vec3> embedding(const SphericalTransform& transform, const Spectrum& support) {
  return embedding(transform.grid(), transform.synthesize_jet(support));
}

double volume(const SphericalGrid& grid, const CurvatureBundle& b) {
  double acc = 0.0;
  for (std::size_t k = 0; k < b.size(); ++k) acc += grid.weight(k) * b.support[k] * b.det_radii[k];
  return acc / (grid.dimension() + 1.0);
}

double volume(const SphericalTransform& transform, const Spectrum& support) {
  const FieldJet jet = transform.synthesize_jet(support);
  const int n = transform.dimension();
  const auto& g = transform.grid();
  double acc = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double s = jet.value[k];
    double det;
    if (n == 1) {
      det = jet.hessian.data[k] + s;
    } else {
      const double* h = &jet.hessian.data[3 * k];
      det = (h[0] + s) * (h[2] + s) - h[1] * h[1];
    }
    acc += g.weight(k) * s * det;
  }
  return acc / (n + 1.0);
}

double p_affine_area(const SphericalGrid& grid, const CurvatureBundle& b, double p) {
  if (!(p >= 1.0)) throw InvalidArgument("p-affine surface area requires p >= 1");
  const double beta = centro_affine_exponent(b.dimension, p);
  double acc = 0.0;
  for (std::size_t k = 0; k < b.size(); ++k) {
    acc += grid.weight(k) * (b.support[k] / b.gauss[k]) * std::pow(b.centro_affine[k], beta);
  }
  return acc;
}

double p_affine_area(const SphericalTransform& transform, const Spectrum& support, double p) {
  return p_affine_area(transform.grid(), curvature_bundle(transform, support), p);
}

IsoperimetricRatio isoperimetric_ratio(int dimension, double vol, double p_area, double p) {
  const double n = dimension;
  IsoperimetricRatio r;
  r.ratio = std::pow(p_area, n + p + 1.0) / std::pow(vol, n + 1.0 - p);
  r.deficit = 1.0 - r.ratio / isoperimetric_bound(dimension, p);
  return r;
}

IsoperimetricRatio isoperimetric_ratio(const SphericalTransform& transform, const Spectrum& support, double p) {
  const CurvatureBundle b = curvature_bundle(transform, support);
  return isoperimetric_ratio(b.dimension, volume(transform.grid(), b), p_affine_area(transform.grid(), b, p), p);
}

RadiusPair inner_outer_radius(const CurvatureBundle& b) {
  RadiusPair r;
  r.inner = *std::min_element(b.support.begin(), b.support.end());
  double outer2 = 0.0;
  const auto n = static_cast<std::size_t>(b.dimension);
  for (std::size_t k = 0; k < b.size(); ++k) {
    double x2 = b.support[k] * b.support[k];
    for (std::size_t i = 0; i < n; ++i) x2 += b.gradient.data[k * n + i] * b.gradient.data[k * n + i];
    outer2 = std::max(outer2, x2);
  }
  r.outer = std::sqrt(outer2);
  return r;
}

RadiusPair inner_outer_radius(const SphericalTransform& transform, const Spectrum& support) {
  return inner_outer_radius(curvature_bundle(transform, support));
}

BodyMetrics body_metrics(const SphericalGrid& grid, const CurvatureBundle& b, double p) {
  BodyMetrics m;
  m.volume = volume(grid, b);
  m.p_area = p_affine_area(grid, b, p);
  const auto iso = isoperimetric_ratio(b.dimension, m.volume, m.p_area, p);
  m.ratio = iso.ratio;
  m.deficit = iso.deficit;
  const auto radii = inner_outer_radius(b);
  m.r_minus = radii.inner;
  m.r_plus = radii.outer;
  return m;
}

}  // namespace centroflow
