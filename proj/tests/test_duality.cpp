#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "centroflow/duality.hpp"
#include "centroflow/errors.hpp"
#include "centroflow/geometry.hpp"
#include "support.hpp"

using namespace centroflow;
namespace ts = testing_support;

namespace {

Vec3 unit(double a, double b, double c) {
  const double l = std::sqrt(a * a + b * b + c * c);
  return {a / l, b / l, c / l};
}

// Radial function of the ellipsoid with semi-axes (a, b, c): (u^T A^{-2} u)^{-1/2}.
double ellipsoid_radial(const Vec3& u, double a, double b, double c) {
  return 1.0 / std::sqrt(u[0] * u[0] / (a * a) + u[1] * u[1] / (b * b) + u[2] * u[2] / (c * c));
}

}  // namespace

TEST_CASE("radial function closed forms") {
  auto t1 = SphericalTransform::for_degree(1, 128);
  CHECK(radial_function(*t1, ts::ball(*t1, 1.3), unit(0.3, -0.8, 0)) == doctest::Approx(1.3).epsilon(1e-13));
  const Spectrum e = ts::ellipsoid(*t1, 2.0, 0.5);
  CHECK(radial_function(*t1, e, unit(1, 0, 0)) == doctest::Approx(2.0).epsilon(1e-12));
  const Vec3 diag = unit(1, 1, 0);
  CHECK(radial_function(*t1, e, diag) == doctest::Approx(ellipsoid_radial(diag, 2.0, 0.5, 1.0)).epsilon(1e-10));
  const RadialFunction rho(*t1, e);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi);
  for (int i = 0; i < 50; ++i) {
    const double a = ang(rng);
    const Vec3 u{std::cos(a), std::sin(a), 0.0};
    CHECK(rho(u) == doctest::Approx(ellipsoid_radial(u, 2.0, 0.5, 1.0)).epsilon(1e-10));
  }

  auto t2 = SphericalTransform::for_degree(2, 48);
  const Spectrum e2 = ts::ellipsoid(*t2, 1.25, 1.0, 0.8);
  const RadialFunction rho2(*t2, e2);
  std::normal_distribution<double> nd;
  for (int i = 0; i < 50; ++i) {
    const Vec3 u = unit(nd(rng), nd(rng), nd(rng));
    CHECK(rho2(u) == doctest::Approx(ellipsoid_radial(u, 1.25, 1.0, 0.8)).epsilon(1e-10));
  }
  CHECK(rho2({0.0, 0.0, 1.0}) == doctest::Approx(0.8).epsilon(1e-10));
}

TEST_CASE("polar of balls and ellipses") {
  for (int n : {1, 2}) {
    auto t = SphericalTransform::for_degree(n, 16);
    const auto unit_polar = polar_support(*t, ts::ball(*t));
    CHECK(max_abs_difference(unit_polar.support, ts::ball(*t)) < 1e-13);
    CHECK(unit_polar.fit_residual < 1e-13);
    CHECK(max_abs_difference(polar_support(*t, ts::ball(*t, 2.0)).support, ts::ball(*t, 0.5)) < 1e-13);
  }
  auto t = SphericalTransform::for_degree(1, 128);
  const auto polar = polar_support(*t, ts::ellipsoid(*t, 2.0, 0.5));
  CHECK(max_abs_difference(polar.support, ts::ellipsoid(*t, 0.5, 2.0)) < 1e-8);
  CHECK(polar.fit_residual < 1e-8);
}

TEST_CASE("double polar and volume product") {
  for (int n : {1, 2}) {
    auto t = SphericalTransform::for_degree(n, n == 1 ? 64 : 32);
    for (unsigned seed = 40; seed < 43; ++seed) {
      const Spectrum s = ts::random_body(*t, seed, 0.1);
      const auto p1 = polar_support(*t, s);
      const auto p2 = polar_support(*t, p1.support);
      const ScalarField a = t->synthesize(s), b = t->synthesize(p2.support);
      double dev = 0.0;
      for (std::size_t k = 0; k < a.size(); ++k) dev = std::max(dev, std::abs(a[k] - b[k]));
      CHECK(dev <= 2.0 * std::max(p1.fit_residual, p2.fit_residual) + 1e-13);
      const double omega = unit_ball_volume(n);
      CHECK(volume(*t, s) * volume(*t, p1.support) <= omega * omega * (1.0 + 1e-10));
    }
  }
}

TEST_CASE("centro-affine curvature identity") {
  for (int n : {1, 2}) {
    auto t = SphericalTransform::for_degree(n, 16);
    CHECK(centro_affine_identity_residual(*t, ts::ball(*t)) < 1e-12);
    CHECK(centro_affine_identity_residual(*t, ts::ball(*t, 1.7)) < 1e-12);
  }
  SUBCASE("unimodular ellipse") {
    auto t = SphericalTransform::for_degree(1, 128);
    CHECK(centro_affine_identity_residual(*t, ts::ellipsoid(*t, 2.0, 0.5)) <= 1e-6);
  }
  SUBCASE("ellipsoid") {
    auto t = SphericalTransform::for_degree(2, 32);
    CHECK(centro_affine_identity_residual(*t, ts::ellipsoid(*t, 1.25, 1.0, 0.8)) <= 1e-6);
  }
  SUBCASE("perturbed ball converges under refinement") {
    double previous = 1.0;
    for (int L : {8, 16, 32}) {
      auto t = SphericalTransform::for_degree(1, L);
      const double r = centro_affine_identity_residual(*t, ts::perturbed_ball(*t, 0.05, 2));
      CHECK(r <= previous / 2.0);
      previous = r;
    }
    CHECK(previous <= 1e-5);
  }
}

TEST_CASE("dual flow right-hand side") {
  for (int n : {1, 2}) {
    auto t = SphericalTransform::for_degree(n, 8);
    for (double p : {1.0, 2.0}) {
      for (double v : dual_flow_rhs(*t, ts::ball(*t), p)) CHECK(v == doctest::Approx(1.0).epsilon(1e-13));
      const double rho = 0.7;
      const double expect = std::pow(rho, 1.0 + (2.0 * n + 2.0) * p / (n + 1.0 + p));
      for (double v : dual_flow_rhs(*t, ts::ball(*t, rho), p)) CHECK(v == doctest::Approx(expect).epsilon(1e-12));
    }
  }
  auto t = SphericalTransform::for_degree(1, 128);
  const Spectrum polar = ts::ellipsoid(*t, 0.5, 2.0);
  const ScalarField s = t->synthesize(polar);
  const ScalarField rhs = dual_flow_rhs(*t, polar, 1.5);
  for (std::size_t k = 0; k < s.size(); ++k) CHECK(rhs[k] == doctest::Approx(s[k]).epsilon(1e-8));
}

TEST_CASE("polar of a non-convex fit is rejected") {
  auto t = SphericalTransform::for_degree(1, 16);
  Spectrum s = ts::ball(*t);
  s.at(4, 4) = 0.5;
  CHECK_THROWS_AS(polar_support(*t, s), ConvexityViolation);
}
