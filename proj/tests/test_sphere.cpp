#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "centroflow/errors.hpp"
#include "centroflow/sphere.hpp"

using namespace centroflow;
using std::numbers::pi;

namespace {

Spectrum random_spectrum(int dim, int lmax, unsigned seed, bool even_only = false) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Spectrum c(dim, lmax);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const int l = c.degree(i);
    if (even_only && l % 2) continue;
    c[i] = u(rng) / (1.0 + l * l);
  }
  return c;
}

Vec3 normalized(Vec3 v) {
  const double n = std::sqrt(dot(v, v));
  return {v[0] / n, v[1] / n, v[2] / n};
}

// Point reached from z along the great circle with initial velocity v
// (tangent), after time t.
Vec3 geodesic(const Vec3& z, const Vec3& v, double t) {
  const double speed = std::sqrt(dot(v, v));
  const double c = std::cos(speed * t), s = std::sin(speed * t);
  return {c * z[0] + s * v[0] / speed, c * z[1] + s * v[1] / speed, c * z[2] + s * v[2] / speed};
}

// Finite-difference oracle for the covariant derivatives: first and second
// derivatives of f along great circles, built only from point evaluation.
struct FdJet {
  std::array<double, 2> grad{};
  std::array<double, 3> hess{};
};

FdJet finite_difference_jet(const Spectrum& c, const Vec3& z, const std::array<Vec3, 2>& e, int dim, double h) {
  auto f = [&](const Vec3& v, double t) { return evaluate_at(c, geodesic(z, v, t)); };
  const double f0 = evaluate_at(c, z);
  FdJet out;
  for (int i = 0; i < dim; ++i) {
    const Vec3& v = e[static_cast<std::size_t>(i)];
    out.grad[static_cast<std::size_t>(i)] = (f(v, h) - f(v, -h)) / (2 * h);
  }
  auto second = [&](const Vec3& v) { return (f(v, h) - 2 * f0 + f(v, -h)) / (h * h); };
  out.hess[0] = second(e[0]);
  if (dim == 2) {
    out.hess[2] = second(e[1]);
    const Vec3 plus{e[0][0] + e[1][0], e[0][1] + e[1][1], e[0][2] + e[1][2]};
    const Vec3 minus{e[0][0] - e[1][0], e[0][1] - e[1][1], e[0][2] - e[1][2]};
    out.hess[1] = (second(plus) - second(minus)) / 4.0;
  }
  return out;
}

}  // namespace

TEST_CASE("grid invariants") {
  SUBCASE("circle") {
    const int res[] = {256};
    const auto g = build_grid(1, res);
    double sum = 0;
    for (double w : g.weights()) sum += w;
    CHECK(std::abs(sum - 2 * pi) < 1e-12 * 2 * pi);
    for (std::size_t k = 0; k < g.size(); ++k) {
      CHECK(std::abs(dot(g.node(k), g.node(k)) - 1) < 1e-14);
      CHECK(std::abs(dot(g.node(k), g.tangent(k, 0))) < 1e-12);
      CHECK(std::abs(dot(g.tangent(k, 0), g.tangent(k, 0)) - 1) < 1e-12);
    }
  }
  SUBCASE("sphere") {
    const int res[] = {64, 128};
    const auto g = build_grid(2, res);
    double sum = 0;
    for (double w : g.weights()) sum += w;
    CHECK(std::abs(sum - 4 * pi) < 1e-12 * 4 * pi);
    for (std::size_t k = 0; k < g.size(); ++k) {
      const auto& z = g.node(k);
      CHECK(std::abs(dot(z, z) - 1) < 1e-14);
      for (int i = 0; i < 2; ++i) {
        CHECK(std::abs(dot(z, g.tangent(k, i))) < 1e-12);
        CHECK(std::abs(dot(g.tangent(k, i), g.tangent(k, i)) - 1) < 1e-12);
      }
      CHECK(std::abs(dot(g.tangent(k, 0), g.tangent(k, 1))) < 1e-12);
    }
  }
  SUBCASE("errors") {
    const int res3[] = {8, 8};
    CHECK_THROWS_AS(build_grid(3, res3), InvalidArgument);
    const int tiny[] = {2};
    CHECK_THROWS_AS(build_grid(1, tiny), InvalidArgument);
    auto g = std::make_shared<const SphericalGrid>(grid_for_degree(2, 8));
    CHECK_THROWS_AS(SphericalTransform(g, 40), InvalidArgument);
  }
}

TEST_CASE("analysis of simple fields") {
  for (int dim : {1, 2}) {
    CAPTURE(dim);
    const auto t = SphericalTransform::for_degree(dim, 12);
    const auto& g = t->grid();
    const ScalarField ones(g.size(), 1.0);
    const Spectrum c = t->analyze(ones);
    CHECK(std::abs(c[0] - std::sqrt(g.area())) < 1e-12);
    for (std::size_t i = 1; i < c.size(); ++i) CHECK(std::abs(c[i]) < 1e-13);

    // Each sampled basis function analyzes to its unit vector; this is also
    // the discrete orthonormality of the quadrature.
    for (std::size_t j = 0; j < c.size(); ++j) {
      ScalarField b(g.size());
      for (std::size_t k = 0; k < g.size(); ++k) {
        b[k] = basis_function(dim, c.degree(j), c.order(j), g.node(k));
      }
      const Spectrum e = t->analyze(b);
      for (std::size_t i = 0; i < e.size(); ++i) {
        CHECK(std::abs(e[i] - (i == j ? 1.0 : 0.0)) < 1e-10);
      }
    }
    CHECK_THROWS_AS(t->analyze(ScalarField(3, 0.0)), InvalidArgument);
  }
}

TEST_CASE("synthesize/analyze round trip") {
  for (int dim : {1, 2}) {
    for (unsigned seed : {1u, 2u, 3u}) {
      const auto t = SphericalTransform::for_degree(dim, 20);
      const Spectrum c = random_spectrum(dim, 20, seed);
      const Spectrum back = t->analyze(t->synthesize(c));
      CHECK(max_abs_difference(c, back) < 1e-12);
    }
  }
}

TEST_CASE("spectral derivatives") {
  SUBCASE("constant field has zero derivatives") {
    for (int dim : {1, 2}) {
      const auto t = SphericalTransform::for_degree(dim, 6);
      Spectrum c(dim, 6);
      c[0] = std::sqrt(t->grid().area());
      const auto jet = t->synthesize_jet(c);
      for (double v : jet.value) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));
      for (double v : jet.gradient.data) CHECK(std::abs(v) < 1e-13);
      for (double v : jet.hessian.data) CHECK(std::abs(v) < 1e-13);
    }
  }
  SUBCASE("cos 2t on the circle") {
    const auto t = SphericalTransform::for_degree(1, 8);
    Spectrum c(1, 8);
    c.at(2, 2) = std::sqrt(pi);
    const auto h = covariant_hessian(c, *t);
    for (std::size_t k = 0; k < t->grid().size(); ++k) {
      const double th = std::atan2(t->grid().node(k)[1], t->grid().node(k)[0]);
      CHECK(std::abs(h.data[k] + 4 * std::cos(2 * th)) < 1e-10);
    }
  }
  SUBCASE("finite-difference oracle") {
    for (int dim : {1, 2}) {
      CAPTURE(dim);
      const int L = 8;
      const auto t = SphericalTransform::for_degree(dim, L);
      const Spectrum c = random_spectrum(dim, L, 17);
      const auto jet = t->synthesize_jet(c);
      const auto& g = t->grid();
      for (std::size_t k = 0; k < g.size(); k += 7) {
        const FdJet fd = finite_difference_jet(c, g.node(k), {g.tangent(k, 0), g.tangent(k, 1)}, dim, 1e-4);
        for (int i = 0; i < dim; ++i) CHECK(std::abs(jet.gradient(k, i) - fd.grad[static_cast<std::size_t>(i)]) < 1e-6);
        CHECK(std::abs(jet.hessian(k, 0, 0) - fd.hess[0]) < 1e-6);
        if (dim == 2) {
          CHECK(std::abs(jet.hessian(k, 0, 1) - fd.hess[1]) < 1e-6);
          CHECK(std::abs(jet.hessian(k, 1, 1) - fd.hess[2]) < 1e-6);
        }
      }
    }
  }
  SUBCASE("off-grid jets, including the poles") {
    const Spectrum c = random_spectrum(2, 10, 5);
    for (const Vec3 u : {Vec3{0, 0, 1}, Vec3{0, 0, -1}, normalized({1e-7, 2e-7, 1}), normalized({0.3, -0.5, 0.2})}) {
      const PointJet pj = evaluate_jet(c, u);
      const FdJet fd = finite_difference_jet(c, u, pj.frame, 2, 1e-4);
      CHECK(std::abs(pj.gradient[0] - fd.grad[0]) < 1e-6);
      CHECK(std::abs(pj.gradient[1] - fd.grad[1]) < 1e-6);
      CHECK(std::abs(pj.hessian[0] - fd.hess[0]) < 1e-6);
      CHECK(std::abs(pj.hessian[1] - fd.hess[1]) < 1e-6);
      CHECK(std::abs(pj.hessian[2] - fd.hess[2]) < 1e-6);
    }
  }
}

TEST_CASE("integration") {
  const auto t1 = SphericalTransform::for_degree(1, 4);
  CHECK(integrate(ScalarField(t1->grid().size(), 1.0), t1->grid()) == doctest::Approx(2 * pi).epsilon(1e-14));
  const auto t2 = SphericalTransform::for_degree(2, 4);
  const auto& g = t2->grid();
  CHECK(integrate(ScalarField(g.size(), 1.0), g) == doctest::Approx(4 * pi).epsilon(1e-14));
  ScalarField z1sq(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) z1sq[k] = g.node(k)[0] * g.node(k)[0];
  CHECK(integrate(z1sq, g) == doctest::Approx(4 * pi / 3).epsilon(1e-13));
}

TEST_CASE("even projection") {
  for (int dim : {1, 2}) {
    const Spectrum even = random_spectrum(dim, 9, 4, true);
    CHECK(max_abs_difference(project_even(even), even) == 0.0);
    Spectrum odd(dim, 9);
    for (std::size_t i = 0; i < odd.size(); ++i) odd[i] = odd.degree(i) % 2 ? 1.0 : 0.0;
    CHECK(max_abs_difference(project_even(odd), Spectrum(dim, 9)) == 0.0);
    const Spectrum mixed = random_spectrum(dim, 9, 8);
    const Spectrum p = project_even(mixed);
    for (std::size_t i = 0; i < p.size(); ++i) CHECK(p[i] == (p.degree(i) % 2 ? 0.0 : mixed[i]));
    CHECK(max_abs_difference(project_even(p), p) == 0.0);
    CHECK(p.odd_energy() == 0.0);
  }
}

TEST_CASE("point evaluation") {
  SUBCASE("constant") {
    Spectrum c(2, 4);
    c[0] = std::sqrt(4 * pi);
    CHECK(evaluate_at(c, normalized({0.2, 0.7, -0.1})) == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("consistent with synthesis at nodes") {
    for (int dim : {1, 2}) {
      const auto t = SphericalTransform::for_degree(dim, 14);
      const Spectrum c = random_spectrum(dim, 14, 11);
      const auto f = t->synthesize(c);
      for (std::size_t k = 0; k < f.size(); k += 3) CHECK(std::abs(evaluate_at(c, t->grid().node(k)) - f[k]) < 1e-12);
    }
  }
  SUBCASE("cos 2t in closed form") {
    Spectrum c(1, 2);
    c.at(2, 2) = std::sqrt(pi);
    CHECK(std::abs(evaluate_at(c, {std::cos(pi / 4), std::sin(pi / 4), 0})) < 1e-12);
    CHECK(std::abs(evaluate_at(c, {0, 1, 0}) + 1.0) < 1e-12);
  }
}

TEST_CASE("spectrum indexing") {
  for (int dim : {1, 2}) {
    Spectrum c(dim, 7);
    for (std::size_t i = 0; i < c.size(); ++i) CHECK(c.index(c.degree(i), c.order(i)) == i);
  }
}
