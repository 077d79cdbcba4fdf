#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "centroflow/errors.hpp"
#include "centroflow/geometry.hpp"
#include "centroflow/normalization.hpp"
#include "support.hpp"

using namespace centroflow;
namespace ts = testing_support;
using std::numbers::pi;

namespace {

std::vector<Vec3> circle_points(int count, double a, double b) {
  std::vector<Vec3> pts;
  for (int i = 0; i < count; ++i) {
    const double t = 2.0 * pi * i / count;
    pts.push_back({a * std::cos(t), b * std::sin(t), 0.0});
  }
  return pts;
}

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("Loewner ellipsoid of planar point sets") {
  SUBCASE("circle") {
    const auto e = lowner_ellipsoid(circle_points(64, 1.0, 1.0), 1);
    CHECK(max_abs(e.shape - Eigen::MatrixXd::Identity(2, 2)) < 1e-10);
  }
  SUBCASE("ellipse (2, 1/2)") {
    const auto e = lowner_ellipsoid(circle_points(200, 2.0, 0.5), 1);
    Eigen::MatrixXd expect(2, 2);
    expect << 0.25, 0.0, 0.0, 4.0;
    CHECK(max_abs(e.shape - expect) < 1e-9);
    CHECK(e.optimality_gap <= 1e-8);
  }
  SUBCASE("square boundary") {
    // brute force over the symmetric family: the circle through the corners
    std::vector<Vec3> pts;
    const int m = 40;
    for (int i = 0; i <= m; ++i) {
      const double v = -1.0 + 2.0 * i / m;
      pts.push_back({v, 1.0, 0.0});
      pts.push_back({v, -1.0, 0.0});
      pts.push_back({1.0, v, 0.0});
      pts.push_back({-1.0, v, 0.0});
    }
    const auto e = lowner_ellipsoid(pts, 1);
    CHECK(max_abs(e.shape - 0.5 * Eigen::MatrixXd::Identity(2, 2)) < 1e-9);
  }
  SUBCASE("degenerate span") {
    std::vector<Vec3> pts;
    for (int i = 0; i < 10; ++i) pts.push_back({0.1 * i - 0.5, 0.0, 0.0});
    CHECK_THROWS_AS(lowner_ellipsoid(pts, 1), DegenerateSpan);
    CHECK_THROWS_AS(lowner_ellipsoid(circle_points(32, 1.0, 1.0), 2), DegenerateSpan);
  }
}

TEST_CASE("Loewner ellipsoid contains every point and is volume optimal") {
  auto t = SphericalTransform::for_degree(2, 16);
  const auto pts = embedding(*t, ts::random_body(*t, 5, 0.1));
  const auto e = lowner_ellipsoid(pts, 2);
  double worst = 0.0;
  for (const auto& x : pts) {
    const Eigen::Vector3d v(x[0], x[1], x[2]);
    worst = std::max(worst, v.dot(e.shape * v));
  }
  CHECK(worst <= 1.0 + 1e-8);
  // shrinking the ellipsoid by 1e-6 loses a point
  CHECK(worst * (1.0 + 1e-6) > 1.0);
  CHECK(e.optimality_gap <= 1e-8);
  // a different ellipsoid with the same points outside cannot be smaller: perturbing
  // M along a traceless direction (det preserved to first order) excludes points
  for (int trial = 0; trial < 3; ++trial) {
    Eigen::Matrix3d d = Eigen::Matrix3d::Zero();
    d(trial, trial) = 1e-3;
    d((trial + 1) % 3, (trial + 1) % 3) = -1e-3;
    const Eigen::MatrixXd m2 = e.shape + e.shape * d;
    double w2 = 0.0;
    for (const auto& x : pts) {
      const Eigen::Vector3d v(x[0], x[1], x[2]);
      w2 = std::max(w2, v.dot(m2 * v));
    }
    CHECK(w2 >= 1.0 - 1e-9);
  }
}

TEST_CASE("transform_support closed forms") {
  auto t = SphericalTransform::for_degree(1, 128);
  const Spectrum ball = ts::ball(*t);
  CHECK(max_abs_difference(transform_support(*t, ball, LinearMap::identity(1)), ball) < 1e-13);

  const Spectrum body = ts::random_body(*t, 3, 0.1);
  CHECK(max_abs_difference(transform_support(*t, body, LinearMap::identity(1)), body) < 1e-13);
  const double lam = 1.7;
  CHECK(max_abs_difference(transform_support(*t, body, LinearMap(lam * Eigen::MatrixXd::Identity(2, 2))), lam * body) <
        1e-13);

  const double d[] = {2.0, 0.5};
  const Spectrum ellipse = transform_support(*t, ball, LinearMap::diagonal(d));
  CHECK(max_abs_difference(ellipse, ts::ellipsoid(*t, 2.0, 0.5)) < 1e-13);

  Eigen::MatrixXd a(2, 2);
  a << 1.5, 0.3, -0.2, 0.9;
  const LinearMap map(a);
  CHECK(volume(*t, transform_support(*t, body, map)) == doctest::Approx(std::abs(map.determinant()) * volume(*t, body)).epsilon(1e-8));
}

TEST_CASE("volume normalization") {
  for (int n : {1, 2}) {
    auto t = SphericalTransform::for_degree(n, 16);
    CHECK(max_abs_difference(normalize_volume(*t, ts::ball(*t, 2.0)), ts::ball(*t)) < 1e-13);
    const Spectrum b = ts::random_body(*t, 8, 0.1);
    const Spectrum nb = normalize_volume(*t, b);
    CHECK(volume(*t, nb) == doctest::Approx(unit_ball_volume(n)).epsilon(1e-13));
    CHECK(max_abs_difference(normalize_volume(*t, nb), nb) < 1e-12);
  }
  auto t = SphericalTransform::for_degree(1, 128);
  CHECK(max_abs_difference(normalize_volume(*t, ts::ellipsoid(*t, 4.0, 1.0)), ts::ellipsoid(*t, 2.0, 0.5)) < 1e-12);
}

TEST_CASE("SL normalization") {
  SUBCASE("unit ball is fixed") {
    for (int n : {1, 2}) {
      auto t = SphericalTransform::for_degree(n, 16);
      const auto r = sl_normalize(*t, ts::ball(*t));
      CHECK(max_abs(r.map.matrix() - Eigen::MatrixXd::Identity(n + 1, n + 1)) < 1e-10);
      CHECK(max_abs_difference(r.support, ts::ball(*t)) < 1e-10);
    }
  }
  SUBCASE("ellipse (2, 1/2) maps to the unit circle") {
    auto t = SphericalTransform::for_degree(1, 128);
    const Spectrum e = ts::ellipsoid(*t, 2.0, 0.5);
    CHECK(distance_to_ball(*t, e) == doctest::Approx(1.0).epsilon(1e-12));
    const auto r = sl_normalize(*t, e);
    CHECK(r.map.unimodular());
    CHECK(max_abs_difference(r.support, ts::ball(*t)) < 1e-8);
    CHECK(distance_to_ball(*t, r.support) < 1e-8);
  }
  SUBCASE("ellipse (4, 1/4) needs higher truncation") {
    auto t = SphericalTransform::for_degree(1, 512);
    const auto r = sl_normalize(*t, ts::ellipsoid(*t, 4.0, 0.25));
    CHECK(max_abs_difference(r.support, ts::ball(*t)) < 1e-6);
  }
  SUBCASE("ellipsoid (2, 1, 1/2)") {
    auto t = SphericalTransform::for_degree(2, 64);
    const auto r = sl_normalize(*t, ts::ellipsoid(*t, 2.0, 1.0, 0.5));
    CHECK(r.map.unimodular());
    CHECK(distance_to_ball(*t, r.support) < 1e-6);
  }
  SUBCASE("sandwich bound and idempotence on random bodies") {
    for (int n : {1, 2}) {
      auto t = SphericalTransform::for_degree(n, n == 1 ? 96 : 40);
      for (unsigned seed = 30; seed < 33; ++seed) {
        Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n + 1, n + 1);
        a(0, 0) = 1.6;
        a(1, 0) = 0.4;
        a(n, n) /= 1.6;
        const Spectrum s = transform_support(*t, ts::random_body(*t, seed, 0.1), LinearMap(a));
        const auto r = sl_normalize(*t, s);
        CHECK(r.map.unimodular());
        const auto v = t->synthesize(r.support);
        const double ratio = *std::max_element(v.begin(), v.end()) / *std::min_element(v.begin(), v.end());
        CHECK(ratio <= std::sqrt(n + 1.0) * (1.0 + 1e-3));
        CHECK(volume(*t, r.support) == doctest::Approx(unit_ball_volume(n)).epsilon(1e-8));
        const auto again = sl_normalize(*t, r.support);
        CHECK(max_abs_difference(again.support, r.support) <= 1e-6);
        CHECK(isoperimetric_ratio(*t, r.support, 2.0).ratio ==
              doctest::Approx(isoperimetric_ratio(*t, s, 2.0).ratio).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("distance to ball") {
  auto t = SphericalTransform::for_degree(2, 8);
  CHECK(distance_to_ball(*t, ts::ball(*t)) < 1e-14);
  CHECK(distance_to_ball(*t, ts::ball(*t, 2.0)) < 1e-13);
}

TEST_CASE("linear map contract") {
  CHECK_THROWS_AS(LinearMap(Eigen::MatrixXd::Zero(2, 2)), InvalidArgument);
  CHECK_THROWS_AS(LinearMap(Eigen::MatrixXd::Identity(4, 4)), InvalidArgument);
  auto t = SphericalTransform::for_degree(1, 8);
  CHECK_THROWS_AS(transform_support(*t, ts::ball(*t), LinearMap::identity(2)), InvalidArgument);
}
