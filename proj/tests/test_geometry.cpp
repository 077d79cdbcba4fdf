#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "centroflow/errors.hpp"
#include "centroflow/geometry.hpp"
#include "centroflow/normalization.hpp"
#include "support.hpp"

using namespace centroflow;
namespace ts = testing_support;
using std::numbers::pi;

TEST_CASE("unit ball values") {
  for (int n : {1, 2}) {
    auto t = SphericalTransform::for_degree(n, 16);
    const Spectrum s = ts::ball(*t);
    const auto b = curvature_bundle(*t, s);
    for (std::size_t k = 0; k < b.size(); ++k) {
      CHECK(b.det_radii[k] == doctest::Approx(1.0).epsilon(1e-13));
      CHECK(b.gauss[k] == doctest::Approx(1.0).epsilon(1e-13));
      CHECK(b.centro_affine[k] == doctest::Approx(1.0).epsilon(1e-13));
      CHECK(b.mean[k] == doctest::Approx(n).epsilon(1e-13));
    }
    const double omega = unit_ball_volume(n);
    CHECK(volume(*t, s) == doctest::Approx(omega).epsilon(1e-13));
    for (double p : {1.0, 1.5, 2.0, 4.0}) {
      CHECK(p_affine_area(*t, s, p) == doctest::Approx((n + 1) * omega).epsilon(1e-13));
      const auto iso = isoperimetric_ratio(*t, s, p);
      CHECK(iso.ratio == doctest::Approx(isoperimetric_bound(n, p)).epsilon(1e-12));
      CHECK(std::abs(iso.deficit) < 1e-12);
    }
    const auto r = inner_outer_radius(*t, s);
    CHECK(r.inner == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(r.outer == doctest::Approx(1.0).epsilon(1e-13));
    const auto x = embedding(*t, s);
    for (std::size_t k = 0; k < x.size(); ++k) {
      for (int c = 0; c < 3; ++c) CHECK(x[k][c] == doctest::Approx(t->grid().node(k)[c]).epsilon(1e-13));
    }
  }
}

TEST_CASE("ball of radius rho scales by homogeneity") {
  for (int n : {1, 2}) {
    auto t = SphericalTransform::for_degree(n, 8);
    const double rho = 1.7;
    const Spectrum s = ts::ball(*t, rho);
    const auto b = curvature_bundle(*t, s);
    for (std::size_t k = 0; k < b.size(); ++k) {
      CHECK(b.gauss[k] == doctest::Approx(std::pow(rho, -n)).epsilon(1e-12));
      CHECK(b.centro_affine[k] == doctest::Approx(std::pow(rho, -(2 * n + 2))).epsilon(1e-12));
    }
    CHECK(volume(*t, s) == doctest::Approx(unit_ball_volume(n) * std::pow(rho, n + 1)).epsilon(1e-12));
    const auto r = inner_outer_radius(*t, s);
    CHECK(r.inner == doctest::Approx(rho));
    CHECK(r.outer == doctest::Approx(rho));
  }
}

TEST_CASE("ellipse (2, 1/2) closed forms") {
  // truncation error of the fit decays like 0.6^(l/2); at 128 it meets the
  // round-off floor of the second derivative, which 1/r then amplifies
  auto t = SphericalTransform::for_degree(1, 128);
  const Spectrum s = ts::ellipsoid(*t, 2.0, 0.5);
  const auto b = curvature_bundle(*t, s);
  // node 0 is theta = 0, normal e1
  CHECK(t->grid().node(0)[0] == doctest::Approx(1.0));
  CHECK(b.support[0] == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(b.kappa[0] == doctest::Approx(8.0).epsilon(1e-8));
  for (std::size_t k = 0; k < b.size(); ++k) CHECK(std::abs(b.centro_affine[k] - 1.0) < 1e-8);
  CHECK(volume(*t, s) == doctest::Approx(pi).epsilon(1e-13));
  for (double p : {1.0, 2.0, 3.5}) CHECK(p_affine_area(*t, s, p) == doctest::Approx(2.0 * pi).epsilon(1e-12));
  CHECK(isoperimetric_ratio(*t, s, 2.0).deficit <= 1e-8);
  CHECK(std::abs(isoperimetric_ratio(*t, s, 2.0).deficit) <= 1e-12);
  const auto r = inner_outer_radius(*t, s);
  CHECK(r.inner == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(r.outer == doctest::Approx(2.0).epsilon(1e-13));
  const auto x = embedding(*t, s);
  CHECK(x[0][0] == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(std::abs(x[0][1]) < 1e-11);
  // curvature of the parametric ellipse at the normal direction theta
  for (std::size_t k = 0; k < b.size(); k += 7) {
    const double th = std::atan2(t->grid().node(k)[1], t->grid().node(k)[0]);
    const double a = 2.0, bb = 0.5;
    const double sup = std::sqrt(a * a * std::cos(th) * std::cos(th) + bb * bb * std::sin(th) * std::sin(th));
    const double exact = std::pow(sup, 3) / (a * a * bb * bb);
    CHECK(std::abs(b.kappa[k] - exact) <= 1e-8 * exact);
  }
}

TEST_CASE("ellipsoid (2, 1, 1/2) closed forms") {
  auto t = SphericalTransform::for_degree(2, 96);
  const Spectrum s = ts::ellipsoid(*t, 2.0, 1.0, 0.5);
  const auto b = curvature_bundle(*t, s);
  double worst = 0.0;
  for (std::size_t k = 0; k < b.size(); ++k) worst = std::max(worst, std::abs(b.centro_affine[k] - 1.0));
  CHECK(worst < 1e-8);
  CHECK(volume(*t, s) == doctest::Approx(4.0 * pi / 3.0).epsilon(1e-10));
  CHECK(std::abs(isoperimetric_ratio(*t, s, 1.5).deficit) <= 1e-8);
  const auto r = inner_outer_radius(*t, s);
  // no grid node sits on the polar axis, so the extremes are attained only approximately
  CHECK(r.inner == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(r.outer == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(r.inner <= r.outer);
}

TEST_CASE("perturbed ball is strictly below the bound") {
  for (int n : {1, 2}) {
    auto t = SphericalTransform::for_degree(n, 24);
    const Spectrum s = ts::perturbed_ball(*t, 0.1, 4);
    for (double p : {1.0, 2.0}) CHECK(isoperimetric_ratio(*t, s, p).deficit > 1e-4);
  }
}

TEST_CASE("p = 1 agrees with the affine surface area integral") {
  for (int n : {1, 2}) {
    auto t = SphericalTransform::for_degree(n, 24);
    for (unsigned seed = 1; seed <= 5; ++seed) {
      const Spectrum s = ts::random_body(*t, seed, 0.1);
      const auto b = curvature_bundle(*t, s);
      ScalarField f(b.size());
      for (std::size_t k = 0; k < b.size(); ++k) f[k] = std::pow(b.gauss[k], -(n + 1.0) / (n + 2.0));
      CHECK(p_affine_area(t->grid(), b, 1.0) == doctest::Approx(integrate(f, t->grid())).epsilon(1e-9));
    }
  }
}

TEST_CASE("embedding identities and curvature invariants on random bodies") {
  for (int n : {1, 2}) {
    auto t = SphericalTransform::for_degree(n, 24);
    for (unsigned seed = 11; seed <= 15; ++seed) {
      const Spectrum s = ts::random_body(*t, seed, 0.1);
      const FieldJet jet = t->synthesize_jet(s);
      const auto x = embedding(t->grid(), jet);
      const auto b = curvature_bundle(jet);
      for (std::size_t k = 0; k < x.size(); ++k) {
        CHECK(std::abs(dot(x[k], t->grid().node(k)) - jet.value[k]) < 1e-12);
        double g2 = 0.0;
        for (int i = 0; i < n; ++i) g2 += jet.gradient(k, i) * jet.gradient(k, i);
        CHECK(std::abs(dot(x[k], x[k]) - (jet.value[k] * jet.value[k] + g2)) < 1e-10);
        double prod = 1.0;
        for (int i = 0; i < n; ++i) prod *= b.eigen[k * n + i];
        CHECK(prod == doctest::Approx(b.det_radii[k]).epsilon(1e-10));
        CHECK(b.gauss[k] * b.det_radii[k] == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(b.mean[k] >= n / std::pow(b.det_radii[k], 1.0 / n) * (1.0 - 1e-12));
      }
      const auto r = inner_outer_radius(b);
      const double rv = std::pow(volume(t->grid(), b) / unit_ball_volume(n), 1.0 / (n + 1));
      CHECK(r.inner <= rv);
      CHECK(rv <= r.outer);
      CHECK(isoperimetric_ratio(*t, s, 2.0).deficit >= -1e-8);
    }
  }
}

TEST_CASE("functionals are rotation, scale and SL invariant") {
  for (int n : {1, 2}) {
    auto t = SphericalTransform::for_degree(n, n == 1 ? 64 : 32);
    const Spectrum s = ts::random_body(*t, 21, 0.1, 6);
    const double p = 2.0;
    const double v0 = volume(*t, s), o0 = p_affine_area(*t, s, p), r0 = isoperimetric_ratio(*t, s, p).ratio;

    Eigen::MatrixXd q;
    if (n == 1) {
      const double a = 0.37;
      q.resize(2, 2);
      q << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
    } else {
      q = Eigen::AngleAxisd(0.61, Eigen::Vector3d(1.0, 2.0, -0.5).normalized()).toRotationMatrix();
    }
    const Spectrum rotated = transform_support(*t, s, LinearMap(q));
    CHECK(volume(*t, rotated) == doctest::Approx(v0).epsilon(1e-9));
    CHECK(p_affine_area(*t, rotated, p) == doctest::Approx(o0).epsilon(1e-9));

    const Spectrum scaled = 2.5 * s;
    CHECK(isoperimetric_ratio(*t, scaled, p).ratio == doctest::Approx(r0).epsilon(1e-9));

    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n + 1, n + 1);
    a(0, 0) = 1.3;
    a(0, 1) = 0.2;
    a(1, 1) = 1.0 / 1.3;
    const LinearMap sl(a);
    REQUIRE(sl.unimodular());
    const Spectrum mapped = transform_support(*t, s, sl);
    CHECK(isoperimetric_ratio(*t, mapped, p).ratio == doctest::Approx(r0).epsilon(1e-6));
    CHECK(volume(*t, mapped) == doctest::Approx(v0).epsilon(1e-8));
  }
}

TEST_CASE("convexity violation is raised, not clamped") {
  auto t = SphericalTransform::for_degree(1, 16);
  Spectrum s = ts::ball(*t);
  s.at(4, 4) = 0.2 * std::sqrt(pi);  // s = 1 + 0.2 cos 4t: radius 1 - 3.0 < 0
  CHECK_THROWS_AS(curvature_bundle(*t, s), ConvexityViolation);
  try {
    curvature_bundle(*t, s);
  } catch (const ConvexityViolation& e) {
    CHECK(e.min_radius() < 0.0);
  }
  CHECK_THROWS_AS(p_affine_area(*t, ts::ball(*t), 0.5), InvalidArgument);
}
