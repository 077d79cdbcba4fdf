#include "centroflow/sphere.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <string>

#include "centroflow/errors.hpp"
#include "legendre.hpp"

namespace centroflow {

namespace {

constexpr double kPi = std::numbers::pi;
const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * kPi);
const double kInvSqrtPi = 1.0 / std::sqrt(kPi);

void require_dimension(int dimension) {
  if (dimension != 1 && dimension != 2) {
    throw InvalidArgument("unsupported dimension " + std::to_string(dimension) + " (expected 1 or 2)");
  }
}

// FFTW planning is not thread safe; execution is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

// ---------------------------------------------------------------------------
// SphericalGrid

double SphericalGrid::area() const noexcept { return dimension_ == 1 ? 2.0 * kPi : 4.0 * kPi; }

int SphericalGrid::max_degree() const noexcept {
  if (dimension_ == 1) return (longitudes_ - 1) / 2;
  return std::min(latitudes_ - 1, (longitudes_ - 1) / 2);
}

SphericalGrid build_grid(int dimension, std::span<const int> resolution) {
  require_dimension(dimension);
  SphericalGrid g;
  g.dimension_ = dimension;

  if (dimension == 1) {
    if (resolution.size() != 1) throw InvalidArgument("n = 1 grids take a single node count");
    const int n = resolution[0];
    if (n < 4) throw InvalidArgument("resolution below minimum: need at least 4 nodes on S^1");
    g.latitudes_ = 1;
    g.longitudes_ = n;
    g.nodes_.resize(static_cast<std::size_t>(n));
    g.frames_.resize(static_cast<std::size_t>(n));
    g.weights_.assign(static_cast<std::size_t>(n), 2.0 * kPi / n);
    for (int k = 0; k < n; ++k) {
      const double t = 2.0 * kPi * k / n;
      const double c = std::cos(t), s = std::sin(t);
      g.nodes_[static_cast<std::size_t>(k)] = {c, s, 0.0};
      g.frames_[static_cast<std::size_t>(k)] = {Vec3{-s, c, 0.0}, Vec3{0.0, 0.0, 0.0}};
    }
    return g;
  }

  if (resolution.size() != 2) throw InvalidArgument("n = 2 grids take {latitudes, longitudes}");
  const int nlat = resolution[0], nlon = resolution[1];
  if (nlat < 2 || nlon < 4) {
    throw InvalidArgument("resolution below minimum: need at least 2 latitudes and 4 longitudes on S^2");
  }
  g.latitudes_ = nlat;
  g.longitudes_ = nlon;
  detail::gauss_legendre(nlat, g.lat_cos_, g.lat_w_);
  g.lat_sin_.resize(g.lat_cos_.size());
  for (std::size_t i = 0; i < g.lat_cos_.size(); ++i) {
    g.lat_sin_[i] = std::sqrt((1.0 - g.lat_cos_[i]) * (1.0 + g.lat_cos_[i]));
  }

  const std::size_t total = static_cast<std::size_t>(nlat) * static_cast<std::size_t>(nlon);
  g.nodes_.resize(total);
  g.frames_.resize(total);
  g.weights_.resize(total);
  for (int i = 0; i < nlat; ++i) {
    const double ct = g.lat_cos_[static_cast<std::size_t>(i)];
    const double st = g.lat_sin_[static_cast<std::size_t>(i)];
    for (int j = 0; j < nlon; ++j) {
      const double phi = 2.0 * kPi * j / nlon;
      const double cp = std::cos(phi), sp = std::sin(phi);
      const std::size_t k = static_cast<std::size_t>(i) * static_cast<std::size_t>(nlon) + static_cast<std::size_t>(j);
      g.nodes_[k] = {st * cp, st * sp, ct};
      g.frames_[k] = {Vec3{ct * cp, ct * sp, -st}, Vec3{-sp, cp, 0.0}};
      g.weights_[k] = g.lat_w_[static_cast<std::size_t>(i)] * 2.0 * kPi / nlon;
    }
  }
  return g;
}

SphericalGrid grid_for_degree(int dimension, int lmax) {
  require_dimension(dimension);
  if (lmax < 0) throw InvalidArgument("negative truncation degree");
  if (dimension == 1) {
    // multiple of 4 so the coordinate axes are nodes
    const int n = std::max(4, (3 * lmax + 2 + 3) / 4 * 4);
    const int res[] = {n};
    return build_grid(1, res);
  }
  const int nlat = std::max(2, (3 * (lmax + 1) + 1) / 2);
  const int res[] = {nlat, 2 * nlat};
  return build_grid(2, res);
}

// ---------------------------------------------------------------------------
// Spectrum

Spectrum::Spectrum(int dimension, int lmax) : dimension_(dimension), lmax_(lmax) {
  require_dimension(dimension);
  if (lmax < 0) throw InvalidArgument("negative truncation degree");
  values_.assign(count(dimension, lmax), 0.0);
}

std::size_t Spectrum::count(int dimension, int lmax) {
  const auto l = static_cast<std::size_t>(lmax);
  return dimension == 1 ? 2 * l + 1 : (l + 1) * (l + 1);
}

std::size_t Spectrum::index(int dimension, int degree, int order) {
  if (degree < 0 || std::abs(order) > degree) throw InvalidArgument("invalid (degree, order)");
  if (dimension == 1) {
    if (degree == 0) return 0;
    if (order == degree) return static_cast<std::size_t>(2 * degree - 1);
    if (order == -degree) return static_cast<std::size_t>(2 * degree);
    throw InvalidArgument("n = 1 orders must be +degree or -degree");
  }
  return static_cast<std::size_t>(degree * degree + degree + order);
}

int Spectrum::degree(std::size_t i) const {
  if (dimension_ == 1) return static_cast<int>((i + 1) / 2);
  return static_cast<int>(std::sqrt(static_cast<double>(i) + 0.5));
}

int Spectrum::order(std::size_t i) const {
  const int l = degree(i);
  if (dimension_ == 1) return i == 0 ? 0 : (i % 2 ? l : -l);
  return static_cast<int>(i) - l * l - l;
}

Spectrum& Spectrum::operator+=(const Spectrum& other) { return add_scaled(1.0, other); }
Spectrum& Spectrum::operator-=(const Spectrum& other) { return add_scaled(-1.0, other); }

Spectrum& Spectrum::operator*=(double factor) {
  for (double& v : values_) v *= factor;
  return *this;
}

Spectrum& Spectrum::add_scaled(double factor, const Spectrum& other) {
  if (other.dimension_ != dimension_ || other.lmax_ != lmax_) throw InvalidArgument("spectrum shape mismatch");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += factor * other.values_[i];
  return *this;
}

Spectrum Spectrum::resized(int lmax) const {
  Spectrum out(dimension_, lmax);
  const std::size_t n = std::min(out.size(), size());
  std::copy_n(values_.begin(), n, out.values_.begin());
  return out;
}

double Spectrum::odd_energy() const {
  double e = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (degree(i) % 2) e += values_[i] * values_[i];
  }
  return e;
}

double Spectrum::tail_energy(double fraction) const {
  const double cutoff = fraction * lmax_;
  double tail = 0.0, total = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double e = values_[i] * values_[i];
    total += e;
    if (degree(i) > cutoff) tail += e;
  }
  return total > 0.0 ? tail / total : 0.0;
}

Spectrum operator+(Spectrum a, const Spectrum& b) { return a += b; }
Spectrum operator-(Spectrum a, const Spectrum& b) { return a -= b; }
Spectrum operator*(double factor, Spectrum a) { return a *= factor; }

double max_abs_difference(const Spectrum& a, const Spectrum& b) {
  if (a.dimension() != b.dimension()) throw InvalidArgument("spectrum dimension mismatch");
  const std::size_t n = std::max(a.size(), b.size());
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = i < a.size() ? a[i] : 0.0;
    const double y = i < b.size() ? b[i] : 0.0;
    d = std::max(d, std::abs(x - y));
  }
  return d;
}

double SymTensorField::operator()(std::size_t node, int i, int j) const {
  if (dimension == 1) return data[node];
  const std::size_t base = node * 3;
  if (i > j) std::swap(i, j);
  return data[base + static_cast<std::size_t>(i + j)];
}

// ---------------------------------------------------------------------------
// Transform implementation

struct SphericalTransform::Impl {
  int dimension = 0;
  int lmax = 0;

  // n = 1: cos/sin(l t_j), node-major with lmax + 1 entries per node.
  std::vector<double> cos_table, sin_table;

  // n = 2: per latitude, (m, l)-ordered tables of Legendre quantities.
  int nlat = 0, nlon = 0, nspec = 0;
  std::size_t ntri = 0;
  std::vector<std::size_t> m_offset;
  std::vector<double> P, D, DD, E, S, SD;
  fftw_plan c2r = nullptr;
  fftw_plan r2c = nullptr;

  std::size_t slot(int i, int m, int l) const {
    return static_cast<std::size_t>(i) * ntri + m_offset[static_cast<std::size_t>(m)] + static_cast<std::size_t>(l - m);
  }

  ~Impl() {
    std::lock_guard lock(fftw_planner_mutex());
    if (c2r) fftw_destroy_plan(c2r);
    if (r2c) fftw_destroy_plan(r2c);
  }
};

SphericalTransform::SphericalTransform(std::shared_ptr<const SphericalGrid> grid, int lmax)
    : grid_(std::move(grid)), lmax_(lmax), impl_(std::make_unique<Impl>()) {
  if (!grid_) throw InvalidArgument("null grid");
  if (lmax < 0) throw InvalidArgument("negative truncation degree");
  if (lmax > grid_->max_degree()) {
    throw InvalidArgument("truncation degree " + std::to_string(lmax) + " exceeds grid resolution (max " +
                          std::to_string(grid_->max_degree()) + ")");
  }
  Impl& im = *impl_;
  im.dimension = grid_->dimension();
  im.lmax = lmax;
  const auto L = static_cast<std::size_t>(lmax);

  if (im.dimension == 1) {
    const std::size_t n = grid_->size();
    im.cos_table.resize(n * (L + 1));
    im.sin_table.resize(n * (L + 1));
    for (std::size_t j = 0; j < n; ++j) {
      const double t = 2.0 * kPi * static_cast<double>(j) / static_cast<double>(n);
      for (std::size_t l = 0; l <= L; ++l) {
        im.cos_table[j * (L + 1) + l] = std::cos(static_cast<double>(l) * t);
        im.sin_table[j * (L + 1) + l] = std::sin(static_cast<double>(l) * t);
      }
    }
    return;
  }

  im.nlat = grid_->latitudes();
  im.nlon = grid_->longitudes();
  im.nspec = im.nlon / 2 + 1;
  im.m_offset.resize(L + 2);
  std::size_t off = 0;
  for (std::size_t m = 0; m <= L; ++m) {
    im.m_offset[m] = off;
    off += L - m + 1;
  }
  im.ntri = off;
  const std::size_t total = im.ntri * static_cast<std::size_t>(im.nlat);
  for (auto* t : {&im.P, &im.D, &im.DD, &im.E, &im.S, &im.SD}) t->resize(total);

  for (int i = 0; i < im.nlat; ++i) {
    const detail::LegendreColumn col(lmax, grid_->latitude_cosines()[static_cast<std::size_t>(i)],
                                     grid_->latitude_sines()[static_cast<std::size_t>(i)], true);
    for (int m = 0; m <= lmax; ++m) {
      for (int l = m; l <= lmax; ++l) {
        const std::size_t k = im.slot(i, m, l);
        const std::size_t t = detail::tri(l, m);
        im.P[k] = col.value[t];
        im.D[k] = col.d1[t];
        im.DD[k] = col.d2[t];
        im.E[k] = -double(l) * (l + 1) * col.value[t] - col.d2[t];
        im.S[k] = col.msin[t];
        im.SD[k] = col.dmsin[t];
      }
    }
  }

  std::vector<std::complex<double>> spec(static_cast<std::size_t>(im.nlat * im.nspec));
  std::vector<double> real(static_cast<std::size_t>(im.nlat * im.nlon));
  const int n[] = {im.nlon};
  std::lock_guard lock(fftw_planner_mutex());
  im.c2r = fftw_plan_many_dft_c2r(1, n, im.nlat, reinterpret_cast<fftw_complex*>(spec.data()), nullptr, 1,
                                  im.nspec, real.data(), nullptr, 1, im.nlon, FFTW_ESTIMATE | FFTW_UNALIGNED);
  im.r2c = fftw_plan_many_dft_r2c(1, n, im.nlat, real.data(), nullptr, 1, im.nlon,
                                  reinterpret_cast<fftw_complex*>(spec.data()), nullptr, 1, im.nspec,
                                  FFTW_ESTIMATE | FFTW_UNALIGNED);
}

SphericalTransform::~SphericalTransform() = default;

std::shared_ptr<const SphericalTransform> SphericalTransform::for_degree(int dimension, int lmax) {
  auto grid = std::make_shared<const SphericalGrid>(grid_for_degree(dimension, lmax));
  return std::make_shared<const SphericalTransform>(std::move(grid), lmax);
}

void SphericalTransform::check_spectrum(const Spectrum& c) const {
  if (c.dimension() != dimension()) throw InvalidArgument("spectrum dimension does not match grid");
  if (c.lmax() > lmax_) {
    throw InvalidArgument("spectrum truncation " + std::to_string(c.lmax()) + " exceeds transform degree " +
                          std::to_string(lmax_) + " (aliasing guard)");
  }
}

Spectrum SphericalTransform::analyze(std::span<const double> f) const {
  if (f.size() != grid_->size()) throw InvalidArgument("field size does not match grid");
  const Impl& im = *impl_;
  Spectrum c(dimension(), lmax_);
  const int L = lmax_;

  if (im.dimension == 1) {
    const std::size_t n = grid_->size();
    const double w = grid_->weight(0);
    const auto stride = static_cast<std::size_t>(L + 1);
    std::vector<double> ca(stride, 0.0), sa(stride, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      const double* ct = &im.cos_table[j * stride];
      const double* st = &im.sin_table[j * stride];
      for (std::size_t l = 0; l < stride; ++l) {
        ca[l] += f[j] * ct[l];
        sa[l] += f[j] * st[l];
      }
    }
    c[0] = w * ca[0] * kInvSqrt2Pi;
    for (int l = 1; l <= L; ++l) {
      c.at(l, l) = w * ca[static_cast<std::size_t>(l)] * kInvSqrtPi;
      c.at(l, -l) = w * sa[static_cast<std::size_t>(l)] * kInvSqrtPi;
    }
    return c;
  }

  std::vector<double> real(f.begin(), f.end());
  std::vector<std::complex<double>> spec(static_cast<std::size_t>(im.nlat * im.nspec));
  fftw_execute_dft_r2c(im.r2c, real.data(), reinterpret_cast<fftw_complex*>(spec.data()));

  const double dphi = 2.0 * kPi / im.nlon;
  for (int i = 0; i < im.nlat; ++i) {
    const double wi = grid_->latitude_weights()[static_cast<std::size_t>(i)] * dphi;
    const std::complex<double>* X = &spec[static_cast<std::size_t>(i * im.nspec)];
    for (int m = 0; m <= L; ++m) {
      const double norm = m == 0 ? kInvSqrt2Pi : kInvSqrtPi;
      const double re = wi * norm * X[m].real();
      const double im_part = -wi * norm * X[m].imag();
      const double* p = &im.P[im.slot(i, m, m)];
      for (int l = m; l <= L; ++l) {
        const double v = p[l - m];
        c.at(l, m) += re * v;
        if (m > 0) c.at(l, -m) += im_part * v;
      }
    }
  }
  return c;
}

ScalarField SphericalTransform::synthesize(const Spectrum& c) const {
  check_spectrum(c);
  const Impl& im = *impl_;
  const int L = c.lmax();
  ScalarField out(grid_->size(), 0.0);

  if (im.dimension == 1) {
    const auto stride = static_cast<std::size_t>(lmax_ + 1);
    for (std::size_t j = 0; j < grid_->size(); ++j) {
      const double* ct = &im.cos_table[j * stride];
      const double* st = &im.sin_table[j * stride];
      double acc = 0.0;
      for (int l = 1; l <= L; ++l) {
        acc += c.at(l, l) * ct[l] + c.at(l, -l) * st[l];
      }
      out[j] = c[0] * kInvSqrt2Pi + acc * kInvSqrtPi;
    }
    return out;
  }

  std::vector<std::complex<double>> spec(static_cast<std::size_t>(im.nlat * im.nspec), 0.0);
  for (int i = 0; i < im.nlat; ++i) {
    std::complex<double>* X = &spec[static_cast<std::size_t>(i * im.nspec)];
    for (int m = 0; m <= L; ++m) {
      const double* p = &im.P[im.slot(i, m, m)];
      double ac = 0.0, as = 0.0;
      for (int l = m; l <= L; ++l) {
        ac += c.at(l, m) * p[l - m];
        if (m > 0) as += c.at(l, -m) * p[l - m];
      }
      X[m] = m == 0 ? std::complex<double>(ac * kInvSqrt2Pi, 0.0)
                    : std::complex<double>(ac, -as) * (0.5 * kInvSqrtPi);
    }
  }
  fftw_execute_dft_c2r(im.c2r, reinterpret_cast<fftw_complex*>(spec.data()), out.data());
  return out;
}

FieldJet SphericalTransform::synthesize_jet(const Spectrum& c) const {
  check_spectrum(c);
  const Impl& im = *impl_;
  const int L = c.lmax();
  const std::size_t n = grid_->size();
  FieldJet jet;
  jet.value.assign(n, 0.0);
  jet.gradient.dimension = dimension();
  jet.gradient.data.assign(n * static_cast<std::size_t>(dimension()), 0.0);
  jet.hessian.dimension = dimension();
  jet.hessian.data.assign(n * static_cast<std::size_t>(SymTensorField::components(dimension())), 0.0);

  if (im.dimension == 1) {
    const auto stride = static_cast<std::size_t>(lmax_ + 1);
    for (std::size_t j = 0; j < n; ++j) {
      const double* ct = &im.cos_table[j * stride];
      const double* st = &im.sin_table[j * stride];
      double v = 0.0, d = 0.0, dd = 0.0;
      for (int l = 1; l <= L; ++l) {
        const double a = c.at(l, l), b = c.at(l, -l);
        const double fc = a * ct[l] + b * st[l];
        v += fc;
        d += l * (b * ct[l] - a * st[l]);
        dd -= double(l) * l * fc;
      }
      jet.value[j] = c[0] * kInvSqrt2Pi + v * kInvSqrtPi;
      jet.gradient.data[j] = d * kInvSqrtPi;
      jet.hessian.data[j] = dd * kInvSqrtPi;
    }
    return jet;
  }

  // Six fields: value, d_theta, d_phi/sin, H_11, H_12, H_22. Fields 2 and 4
  // carry a phi-derivative of the azimuthal factor.
  constexpr int kFields = 6;
  const std::size_t block = static_cast<std::size_t>(im.nlat * im.nspec);
  std::vector<std::complex<double>> spec(block * kFields, 0.0);
  for (int i = 0; i < im.nlat; ++i) {
    for (int m = 0; m <= L; ++m) {
      const std::size_t s0 = im.slot(i, m, m);
      const double* tabs[kFields] = {&im.P[s0], &im.D[s0], &im.S[s0], &im.DD[s0], &im.SD[s0], &im.E[s0]};
      double ac[kFields] = {}, as[kFields] = {};
      for (int l = m; l <= L; ++l) {
        const double cc = c.at(l, m);
        const double cs = m > 0 ? c.at(l, -m) : 0.0;
        const int k = l - m;
        for (int q = 0; q < kFields; ++q) {
          ac[q] += cc * tabs[q][k];
          as[q] += cs * tabs[q][k];
        }
      }
      for (int q = 0; q < kFields; ++q) {
        std::complex<double> X;
        if (m == 0) {
          X = (q == 2 || q == 4) ? 0.0 : std::complex<double>(ac[q] * kInvSqrt2Pi, 0.0);
        } else if (q == 2 || q == 4) {
          // d/dphi maps (cos, sin) amplitudes (a, b) to (m b, -m a); the m is
          // already folded into the msin tables.
          X = std::complex<double>(as[q], ac[q]) * (0.5 * kInvSqrtPi);
        } else {
          X = std::complex<double>(ac[q], -as[q]) * (0.5 * kInvSqrtPi);
        }
        spec[static_cast<std::size_t>(q) * block + static_cast<std::size_t>(i * im.nspec + m)] = X;
      }
    }
  }

  std::vector<double> real(n);
  for (int q = 0; q < kFields; ++q) {
    fftw_execute_dft_c2r(im.c2r, reinterpret_cast<fftw_complex*>(&spec[static_cast<std::size_t>(q) * block]),
                         real.data());
    switch (q) {
      case 0: jet.value = real; break;
      case 1:
      case 2:
        for (std::size_t k = 0; k < n; ++k) jet.gradient.data[2 * k + static_cast<std::size_t>(q - 1)] = real[k];
        break;
      default:
        for (std::size_t k = 0; k < n; ++k) jet.hessian.data[3 * k + static_cast<std::size_t>(q - 3)] = real[k];
        break;
    }
  }
  return jet;
}

// ---------------------------------------------------------------------------
// Free functions

Spectrum analyze(std::span<const double> field, const SphericalTransform& transform) {
  return transform.analyze(field);
}

ScalarField synthesize(const Spectrum& coefficients, const SphericalTransform& transform) {
  return transform.synthesize(coefficients);
}

VectorField gradient(const Spectrum& coefficients, const SphericalTransform& transform) {
  return transform.synthesize_jet(coefficients).gradient;
}

SymTensorField covariant_hessian(const Spectrum& coefficients, const SphericalTransform& transform) {
  return transform.synthesize_jet(coefficients).hessian;
}

double integrate(std::span<const double> field, const SphericalGrid& grid) {
  if (field.size() != grid.size()) throw InvalidArgument("field size does not match grid");
  double acc = 0.0;
  for (std::size_t k = 0; k < field.size(); ++k) acc += grid.weight(k) * field[k];
  return acc;
}

Spectrum project_even(Spectrum c) {
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c.degree(i) % 2) c[i] = 0.0;
  }
  return c;
}

std::array<Vec3, 2> tangent_frame(int dimension, const Vec3& u) {
  require_dimension(dimension);
  if (dimension == 1) {
    const double t = std::atan2(u[1], u[0]);
    return {Vec3{-std::sin(t), std::cos(t), 0.0}, Vec3{}};
  }
  const double st = std::hypot(u[0], u[1]);
  const double theta = std::atan2(st, u[2]);
  const double phi = std::atan2(u[1], u[0]);
  const double ct = std::cos(theta), sn = std::sin(theta), cp = std::cos(phi), sp = std::sin(phi);
  return {Vec3{ct * cp, ct * sp, -sn}, Vec3{-sp, cp, 0.0}};
}

namespace {

PointJet jet_at(const Spectrum& c, const Vec3& u, bool with_derivatives) {
  PointJet out;
  out.direction = u;
  const int L = c.lmax();
  if (c.dimension() == 1) {
    const double t = std::atan2(u[1], u[0]);
    out.frame = {Vec3{-std::sin(t), std::cos(t), 0.0}, Vec3{}};
    double v = 0.0, d = 0.0, dd = 0.0;
    for (int l = 1; l <= L; ++l) {
      const double a = c.at(l, l), b = c.at(l, -l);
      const double cl = std::cos(l * t), sl = std::sin(l * t);
      const double fc = a * cl + b * sl;
      v += fc;
      d += l * (b * cl - a * sl);
      dd -= double(l) * l * fc;
    }
    out.value = c[0] * kInvSqrt2Pi + v * kInvSqrtPi;
    out.gradient[0] = d * kInvSqrtPi;
    out.hessian[0] = dd * kInvSqrtPi;
    return out;
  }

  const double st = std::hypot(u[0], u[1]);
  const double theta = std::atan2(st, u[2]);
  const double phi = std::atan2(u[1], u[0]);
  const double ct = std::cos(theta), sn = std::sin(theta);
  const double cp = std::cos(phi), sp = std::sin(phi);
  out.frame = {Vec3{ct * cp, ct * sp, -sn}, Vec3{-sp, cp, 0.0}};

  const detail::LegendreColumn col(L, ct, sn, with_derivatives);
  double v = 0.0, gt = 0.0, gp = 0.0, h11 = 0.0, h12 = 0.0, h22 = 0.0;
  for (int m = 0; m <= L; ++m) {
    const double norm = m == 0 ? kInvSqrt2Pi : kInvSqrtPi;
    const double cm = std::cos(m * phi) * norm, sm = std::sin(m * phi) * norm;
    for (int l = m; l <= L; ++l) {
      const double cc = c.at(l, m);
      const double cs = m > 0 ? c.at(l, -m) : 0.0;
      const double az = cc * cm + cs * sm;  // coefficient-weighted azimuthal factor
      const std::size_t t = detail::tri(l, m);
      v += az * col.value[t];
      if (!with_derivatives) continue;
      const double daz = cs * cm - cc * sm;  // d/dphi of az, divided by m
      gt += az * col.d1[t];
      h11 += az * col.d2[t];
      h22 += az * (-double(l) * (l + 1) * col.value[t] - col.d2[t]);
      if (m > 0) {
        gp += daz * col.msin[t];
        h12 += daz * col.dmsin[t];
      }
    }
  }
  out.value = v;
  out.gradient = {gt, gp};
  out.hessian = {h11, h12, h22};
  return out;
}

}  // namespace

double evaluate_at(const Spectrum& c, const Vec3& u) { return jet_at(c, u, false).value; }

PointJet evaluate_jet(const Spectrum& c, const Vec3& u) { return jet_at(c, u, true); }

double basis_function(int dimension, int degree, int order, const Vec3& u) {
  Spectrum c(dimension, degree);
  c.at(degree, order) = 1.0;
  return evaluate_at(c, u);
}

}  // namespace centroflow
