#include "centroflow/duality.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "centroflow/errors.hpp"
#include "centroflow/geometry.hpp"

namespace centroflow {

namespace {

Vec3 normalized(Vec3 v) {
  const double len = std::sqrt(dot(v, v));
  for (auto& c : v) c /= len;
  return v;
}

}  // namespace

RadialFunction::RadialFunction(const SphericalTransform& transform, const Spectrum& support)
    : support_(support), grid_(transform.grid()) {
  const auto x = embedding(transform, support);
  directions_.reserve(x.size());
  for (const auto& p : x) directions_.push_back(normalized(p));
}

Vec3 RadialFunction::contact_normal(const Vec3& u) const {
  const int n = support_.dimension();
  std::size_t best = 0;
  double best_cos = -2.0;
  for (std::size_t k = 0; k < directions_.size(); ++k) {
    const double c = dot(directions_[k], u);
    if (c > best_cos) {
      best_cos = c;
      best = k;
    }
  }
  Vec3 z = grid_.node(best);

  for (int iter = 0; iter < 20; ++iter) {
    const PointJet j = evaluate_jet(support_, z);
    Eigen::Vector3d x = Eigen::Vector3d::Zero(), e1, e2 = Eigen::Vector3d::Zero();
    for (int c = 0; c < 3; ++c) {
      e1[c] = j.frame[0][static_cast<std::size_t>(c)];
      if (n == 2) e2[c] = j.frame[1][static_cast<std::size_t>(c)];
      x[c] = j.value * z[static_cast<std::size_t>(c)] + j.gradient[0] * e1[c] + (n == 2 ? j.gradient[1] * e2[c] : 0.0);
    }
    const Eigen::Vector3d uu(u[0], u[1], u[2]);
    const Eigen::Vector3d residual = x - uu * uu.dot(x);
    if (residual.norm() <= 1e-15 * x.norm()) break;

    // dx = r_ij delta_j e_i
    Eigen::Vector2d step;
    if (n == 1) {
      const double r = j.hessian[0] + j.value;
      const Eigen::Vector3d col = r * (e1 - uu * uu.dot(e1));
      step[0] = -col.dot(residual) / col.squaredNorm();
      step[1] = 0.0;
    } else {
      const double r11 = j.hessian[0] + j.value, r12 = j.hessian[1], r22 = j.hessian[2] + j.value;
      Eigen::Matrix<double, 3, 2> J;
      J.col(0) = r11 * e1 + r12 * e2;
      J.col(1) = r12 * e1 + r22 * e2;
      J.col(0) -= uu * uu.dot(J.col(0));
      J.col(1) -= uu * uu.dot(J.col(1));
      step = -(J.transpose() * J).ldlt().solve(J.transpose() * residual);
    }
    const double len = step.norm();
    if (!std::isfinite(len)) break;
    if (len > 0.5) step *= 0.5 / len;
    for (int c = 0; c < 3; ++c) z[static_cast<std::size_t>(c)] += step[0] * e1[c] + step[1] * e2[c];
    z = normalized(z);
    if (len < 1e-15) break;
  }
  return z;
}

double RadialFunction::operator()(const Vec3& u) const {
  const Vec3 z = contact_normal(u);
  const double c = dot(z, u);
  if (!(c > 0.0)) throw InvalidArgument("radial function: contact normal left the hemisphere of u");
  return evaluate_at(support_, z) / c;
}

double radial_function(const SphericalTransform& transform, const Spectrum& support, const Vec3& u) {
  return RadialFunction(transform, support)(u);
}

PolarSupport polar_support(const SphericalTransform& transform, const Spectrum& support) {
  const RadialFunction rho(transform, support);
  const auto& g = transform.grid();
  ScalarField exact(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) exact[k] = 1.0 / rho(g.node(k));

  PolarSupport out;
  out.support = project_even(transform.analyze(exact)).resized(support.lmax());
  const ScalarField fitted = transform.synthesize(out.support);
  for (std::size_t k = 0; k < g.size(); ++k) out.fit_residual = std::max(out.fit_residual, std::abs(fitted[k] - exact[k]));
  curvature_bundle(transform, out.support);
  return out;
}

double centro_affine_identity_residual(const SphericalTransform& transform, const Spectrum& support,
                                       const Spectrum& polar) {
  const FieldJet jet = transform.synthesize_jet(support);
  const CurvatureBundle b = curvature_bundle(jet);
  const auto x = embedding(transform.grid(), jet);
  double worst = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const PointCurvature pc = point_curvature(polar, normalized(x[k]));
    worst = std::max(worst, std::abs(b.centro_affine[k] * pc.centro_affine - 1.0));
  }
  return worst;
}

double centro_affine_identity_residual(const SphericalTransform& transform, const Spectrum& support) {
  return centro_affine_identity_residual(transform, support, polar_support(transform, support).support);
}

ScalarField dual_flow_rhs(const SphericalTransform& transform, const Spectrum& polar, double p) {
  const CurvatureBundle b = curvature_bundle(transform, polar);
  const double beta = centro_affine_exponent(b.dimension, p);
  ScalarField out(b.size());
  for (std::size_t k = 0; k < b.size(); ++k) out[k] = b.support[k] * std::pow(b.centro_affine[k], -beta);
  return out;
}

}  // namespace centroflow
