#include "centroflow/normalization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

#include "centroflow/errors.hpp"
#include "centroflow/geometry.hpp"

namespace centroflow {

LinearMap::LinearMap(Eigen::MatrixXd matrix) : matrix_(std::move(matrix)) {
  if (matrix_.rows() != matrix_.cols() || matrix_.rows() < 2 || matrix_.rows() > 3) {
    throw InvalidArgument("linear map must be 2x2 or 3x3");
  }
  determinant_ = matrix_.determinant();
  if (!(std::abs(determinant_) > 0.0) || !std::isfinite(determinant_)) throw InvalidArgument("linear map is singular");
}

LinearMap LinearMap::identity(int dimension) {
  return LinearMap(Eigen::MatrixXd::Identity(dimension + 1, dimension + 1));
}

LinearMap LinearMap::diagonal(std::span<const double> entries) {
  Eigen::VectorXd d(static_cast<Eigen::Index>(entries.size()));
  for (std::size_t i = 0; i < entries.size(); ++i) d[static_cast<Eigen::Index>(i)] = entries[i];
  return LinearMap(d.asDiagonal());
}

namespace {

// Symmetric basis E_k: diagonal units and symmetrized off-diagonal pairs.
std::vector<std::pair<int, int>> sym_basis(int d) {
  std::vector<std::pair<int, int>> out;
  for (int a = 0; a < d; ++a) {
    for (int b = a; b < d; ++b) out.emplace_back(a, b);
  }
  return out;
}

}  // namespace

LownerEllipsoid lowner_ellipsoid(std::span<const Vec3> points, int dimension, const LownerOptions& options) {
  const int d = dimension + 1;
  const auto count = static_cast<Eigen::Index>(points.size());
  if (count < d) throw DegenerateSpan("too few points for an ellipsoid");

  Eigen::MatrixXd P(d, count);
  for (Eigen::Index i = 0; i < count; ++i) {
    for (int c = 0; c < d; ++c) P(c, i) = points[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];
  }

  // Whiten with the second moment so the barrier problem is well scaled.
  const Eigen::MatrixXd moment = P * P.transpose() / static_cast<double>(count);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(moment);
  const double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo > options.max_condition) throw DegenerateSpan("boundary samples lie near a hyperplane");
  const Eigen::MatrixXd C =
      es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
  const Eigen::MatrixXd Y = C * P;

  const auto basis = sym_basis(d);
  const auto nb = static_cast<Eigen::Index>(basis.size());
  // A(i, k) = y_i^T E_k y_i
  Eigen::MatrixXd A(count, nb);
  for (Eigen::Index k = 0; k < nb; ++k) {
    const auto [a, b] = basis[static_cast<std::size_t>(k)];
    A.col(k) = (a == b ? 1.0 : 2.0) * Y.row(a).cwiseProduct(Y.row(b)).transpose();
  }
  auto to_matrix = [&](const Eigen::VectorXd& m) {
    Eigen::MatrixXd M(d, d);
    for (Eigen::Index k = 0; k < nb; ++k) {
      const auto [a, b] = basis[static_cast<std::size_t>(k)];
      M(a, b) = M(b, a) = m[k];
    }
    return M;
  };

  const double n_constraints = static_cast<double>(count);
  // Barrier objective  -t log det M - sum log(1 - y_i^T M y_i); infinite when infeasible.
  auto barrier = [&](const Eigen::VectorXd& m, double t) {
    const Eigen::LLT<Eigen::MatrixXd> llt(to_matrix(m));
    if (llt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
    const Eigen::VectorXd g = Eigen::VectorXd::Ones(count) - A * m;
    if (!(g.minCoeff() > 0.0)) return std::numeric_limits<double>::infinity();
    const double logdet = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    return -t * logdet - g.array().log().sum();
  };

  Eigen::VectorXd m = Eigen::VectorXd::Zero(nb);
  {
    const double rmax = Y.colwise().squaredNorm().maxCoeff();
    for (Eigen::Index k = 0; k < nb; ++k) {
      if (basis[static_cast<std::size_t>(k)].first == basis[static_cast<std::size_t>(k)].second) m[k] = 0.5 / rmax;
    }
  }

  long newton_steps = 0;
  double t = 1.0;
  for (;;) {
    for (int inner = 0; inner < 200; ++inner, ++newton_steps) {
      if (newton_steps >= options.max_iterations) break;
      const Eigen::MatrixXd Minv = to_matrix(m).inverse();
      const Eigen::VectorXd ginv = (Eigen::VectorXd::Ones(count) - A * m).cwiseInverse();
      Eigen::VectorXd grad = A.transpose() * ginv;
      Eigen::MatrixXd H = A.transpose() * ginv.cwiseAbs2().asDiagonal() * A;
      for (Eigen::Index k = 0; k < nb; ++k) {
        const auto [a, b] = basis[static_cast<std::size_t>(k)];
        grad[k] -= t * (a == b ? 1.0 : 2.0) * Minv(a, b);
        for (Eigen::Index l = 0; l < nb; ++l) {
          const auto [c, e] = basis[static_cast<std::size_t>(l)];
          // tr(Minv E_k Minv E_l)
          double tr = Minv(b, c) * Minv(e, a);
          if (c != e) tr += Minv(b, e) * Minv(c, a);
          if (a != b) tr += Minv(a, c) * Minv(e, b) + (c != e ? Minv(a, e) * Minv(c, b) : 0.0);
          H(k, l) += t * tr;
        }
      }
      const Eigen::VectorXd step = -H.ldlt().solve(grad);
      const double decrement = -grad.dot(step);
      if (!(decrement > 1e-10)) break;
      const double f0 = barrier(m, t);
      double alpha = 1.0;
      while (alpha > 1e-16 && !(barrier(m + alpha * step, t) <= f0 - 0.25 * alpha * decrement)) alpha *= 0.5;
      if (alpha <= 1e-16) break;
      m += alpha * step;
    }
    if (n_constraints / t <= options.tolerance || newton_steps >= options.max_iterations) break;
    t *= 8.0;
  }

  LownerEllipsoid out;
  const Eigen::MatrixXd My = to_matrix(m);
  const double kmax = (Y.transpose() * My).cwiseProduct(Y.transpose()).rowwise().sum().maxCoeff();
  out.shape = C * (My / kmax) * C;
  out.shape = 0.5 * (out.shape + out.shape.transpose()).eval();
  out.optimality_gap = std::expm1(0.5 * n_constraints / t);
  out.iterations = newton_steps;
  return out;
}

Spectrum transform_support(const SphericalTransform& transform, const Spectrum& support, const LinearMap& map) {
  const int n = transform.dimension();
  if (map.dimension() != n) throw InvalidArgument("linear map dimension does not match support function");
  const auto& g = transform.grid();
  const Eigen::MatrixXd At = map.matrix().transpose();
  ScalarField values(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    Eigen::VectorXd u(n + 1);
    for (int c = 0; c <= n; ++c) u[c] = g.node(k)[static_cast<std::size_t>(c)];
    const Eigen::VectorXd v = At * u;
    const double len = v.norm();
    Vec3 dir{};
    for (int c = 0; c <= n; ++c) dir[static_cast<std::size_t>(c)] = v[c] / len;
    values[k] = len * evaluate_at(support, dir);
  }
  return project_even(transform.analyze(values)).resized(support.lmax());
}

Spectrum normalize_volume(const SphericalTransform& transform, const Spectrum& support) {
  const int n = transform.dimension();
  const double v = volume(transform, support);
  if (!(v > 0.0)) throw InvalidArgument("body has non-positive volume");
  Spectrum out = support;
  out *= std::pow(unit_ball_volume(n) / v, 1.0 / (n + 1.0));
  return out;
}

namespace {

// Grid neighbours of node k (ring for n = 1, 8-neighbourhood in the
// latitude-major layout for n = 2).
std::vector<std::size_t> grid_neighbours(const SphericalGrid& g, std::size_t k) {
  std::vector<std::size_t> out;
  if (g.dimension() == 1) {
    const std::size_t n = g.size();
    out = {(k + n - 1) % n, (k + 1) % n};
    return out;
  }
  const int nlat = g.latitudes(), nlon = g.longitudes();
  const int i = static_cast<int>(k) / nlon, j = static_cast<int>(k) % nlon;
  for (int di = -1; di <= 1; ++di) {
    for (int dj = -1; dj <= 1; ++dj) {
      if ((di == 0 && dj == 0) || i + di < 0 || i + di >= nlat) continue;
      out.push_back(static_cast<std::size_t>((i + di) * nlon + (j + dj + nlon) % nlon));
    }
  }
  return out;
}

Vec3 boundary_point(const Spectrum& s, const Vec3& z) { return point_curvature(s, z).boundary_point; }

double quad_form(const Eigen::MatrixXd& M, const Vec3& x) {
  double acc = 0.0;
  for (Eigen::Index a = 0; a < M.rows(); ++a) {
    for (Eigen::Index b = 0; b < M.cols(); ++b) {
      acc += x[static_cast<std::size_t>(a)] * M(a, b) * x[static_cast<std::size_t>(b)];
    }
  }
  return acc;
}

// Local maximizer of x(z)^T M x(z) near z0 by Newton on central differences in
// tangent coordinates. Returns z0 unchanged when the neighbourhood is flat.
Vec3 refine_contact(const Spectrum& s, const Eigen::MatrixXd& M, Vec3 z, double max_shift) {
  const int n = s.dimension();
  const double h = 1e-4;
  for (int iter = 0; iter < 8; ++iter) {
    const auto frame = tangent_frame(n, z);
    auto f = [&](double a, double b) {
      Vec3 w{};
      double len = 0.0;
      for (std::size_t c = 0; c < 3; ++c) {
        w[c] = z[c] + a * frame[0][c] + (n == 2 ? b * frame[1][c] : 0.0);
        len += w[c] * w[c];
      }
      len = std::sqrt(len);
      for (auto& v : w) v /= len;
      return quad_form(M, boundary_point(s, w));
    };
    const double f0 = f(0, 0);
    Eigen::Vector2d g = Eigen::Vector2d::Zero();
    Eigen::Matrix2d H = Eigen::Matrix2d::Identity();
    const double fp = f(h, 0), fm = f(-h, 0);
    g[0] = (fp - fm) / (2 * h);
    H(0, 0) = (fp - 2 * f0 + fm) / (h * h);
    if (n == 2) {
      const double gp = f(0, h), gm = f(0, -h);
      g[1] = (gp - gm) / (2 * h);
      H(1, 1) = (gp - 2 * f0 + gm) / (h * h);
      H(0, 1) = H(1, 0) = (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4 * h * h);
    }
    const Eigen::Index m = n;
    const Eigen::MatrixXd Hn = H.topLeftCorner(m, m);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Hn);
    if (!(es.eigenvalues().maxCoeff() < 0.0)) return z;
    Eigen::VectorXd step = -Hn.ldlt().solve(g.head(m));
    const double len = step.norm();
    if (!std::isfinite(len)) return z;
    if (len > max_shift) step *= max_shift / len;
    double norm = 0.0;
    for (std::size_t c = 0; c < 3; ++c) {
      z[c] += step[0] * frame[0][c] + (n == 2 ? step[1] * frame[1][c] : 0.0);
      norm += z[c] * z[c];
    }
    norm = std::sqrt(norm);
    for (auto& v : z) v /= norm;
    if (len < 1e-11) break;
  }
  return z;
}

}  // namespace

LownerEllipsoid lowner_ellipsoid(const SphericalTransform& transform, const Spectrum& support,
                                 const LownerOptions& options) {
  const int n = transform.dimension();
  const auto& g = transform.grid();
  const std::vector<Vec3> samples = embedding(transform, support);
  LownerEllipsoid e = lowner_ellipsoid(samples, n, options);

  // Samples only approximate the contact points. Exchange loop: refine every
  // sampled local maximum of x^T M x to a continuous maximizer and re-solve on
  // the refined contacts plus the sampled peaks.
  const double spacing = n == 1 ? 2.0 * std::numbers::pi / static_cast<double>(g.size())
                                : std::numbers::pi / static_cast<double>(g.latitudes());
  std::vector<Vec3> contacts;
  long steps = e.iterations;
  for (int round = 0; round < 60; ++round) {
    std::vector<double> f(samples.size());
    for (std::size_t k = 0; k < samples.size(); ++k) f[k] = quad_form(e.shape, samples[k]);
    const double fmax = *std::max_element(f.begin(), f.end());
    double worst = fmax;
    std::vector<Vec3> working;
    for (std::size_t k = 0; k < samples.size(); ++k) {
      if (f[k] < fmax - 0.05) continue;
      if (f[k] >= fmax - 1e-9) working.push_back(samples[k]);  // keeps flat (ellipsoidal) cases well posed
      bool peak = true;
      for (std::size_t j : grid_neighbours(g, k)) peak = peak && f[j] <= f[k];
      if (!peak) continue;
      if (f[k] < fmax - 1e-9) working.push_back(samples[k]);
      const Vec3 z = refine_contact(support, e.shape, g.node(k), 2.0 * spacing);
      const Vec3 x = boundary_point(support, z);
      worst = std::max(worst, quad_form(e.shape, x));
      contacts.push_back(x);
    }
    if (worst <= 1.0 + options.contact_tolerance) break;
    working.insert(working.end(), contacts.begin(), contacts.end());
    e = lowner_ellipsoid(working, n, options);
    steps += e.iterations;
  }

  double fmax = 0.0;
  for (const auto& x : samples) fmax = std::max(fmax, quad_form(e.shape, x));
  for (const auto& x : contacts) fmax = std::max(fmax, quad_form(e.shape, x));
  if (fmax > 1.0) e.shape /= fmax;
  e.iterations = steps;
  return e;
}

SlNormalized sl_normalize(const SphericalTransform& transform, const Spectrum& support,
                          const LownerOptions& options) {
  const int n = transform.dimension();
  const Spectrum s = normalize_volume(transform, support);
  const LownerEllipsoid e = lowner_ellipsoid(transform, s, options);

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(e.shape);
  const Eigen::VectorXd root = es.eigenvalues().cwiseSqrt();
  Eigen::MatrixXd sqrt_m = es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();
  sqrt_m = 0.5 * (sqrt_m + sqrt_m.transpose()).eval();
  const double det = root.prod();
  LinearMap L(sqrt_m / std::pow(det, 1.0 / (n + 1.0)));

  // det L = 1, so rescaling only removes the refit error in the volume
  Spectrum mapped = normalize_volume(transform, transform_support(transform, s, L));
  curvature_bundle(transform, mapped);  // refit must stay convex
  return {std::move(mapped), std::move(L)};
}

double distance_to_ball(const SphericalTransform& transform, const Spectrum& support) {
  const ScalarField values = transform.synthesize(normalize_volume(transform, support));
  double d = 0.0;
  for (double v : values) d = std::max(d, std::abs(v - 1.0));
  return d;
}

}  // namespace centroflow
