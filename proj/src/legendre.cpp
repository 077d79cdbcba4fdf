#include "legendre.hpp"

#include <cmath>
#include <numbers>

namespace centroflow::detail {

void gauss_legendre(int count, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(static_cast<std::size_t>(count), 0.0);
  weights.assign(static_cast<std::size_t>(count), 0.0);
  const double n = count;
  for (int i = 0; i < count; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= count; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (count == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // one more derivative evaluation at the converged node
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= count; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    if (count == 1) p0 = 1.0;
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    nodes[static_cast<std::size_t>(i)] = x;
    weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

namespace {

// d/dtheta applied to a table f indexed by tri(l, m), using
//   d/dtheta Pbar_l^m = (A Pbar_l^{m-1} - B Pbar_l^{m+1}) / 2,
//   A = sqrt((l+m)(l-m+1)), B = sqrt((l+m+1)(l-m)),
// and d/dtheta Pbar_l^0 = -sqrt(l(l+1)) Pbar_l^1.
void ladder_derivative(const std::vector<double>& f, std::vector<double>& out, int top) {
  for (int l = 0; l <= top; ++l) {
    out[tri(l, 0)] = l > 0 ? -std::sqrt(double(l) * (l + 1)) * f[tri(l, 1)] : 0.0;
    for (int m = 1; m <= l; ++m) {
      const double a = std::sqrt(double(l + m) * (l - m + 1));
      const double b = m < l ? std::sqrt(double(l + m + 1) * (l - m)) * f[tri(l, m + 1)] : 0.0;
      out[tri(l, m)] = 0.5 * (a * f[tri(l, m - 1)] - b);
    }
  }
}

}  // namespace

LegendreColumn::LegendreColumn(int lmax_, double x, double s, bool with_derivatives) : lmax(lmax_) {
  const int top = with_derivatives ? lmax + 1 : lmax;
  const std::size_t n_top = tri(top, top) + 1;
  value.assign(n_top, 0.0);

  value[0] = 1.0 / std::numbers::sqrt2;
  for (int m = 1; m <= top; ++m) {
    value[tri(m, m)] = std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s * value[tri(m - 1, m - 1)];
  }
  for (int m = 0; m < top; ++m) {
    value[tri(m + 1, m)] = std::sqrt(2.0 * m + 3.0) * x * value[tri(m, m)];
  }
  for (int m = 0; m <= top; ++m) {
    for (int l = m + 2; l <= top; ++l) {
      const double l2m2 = double(l) * l - double(m) * m;
      const double a = std::sqrt((4.0 * l * l - 1.0) / l2m2);
      const double b = std::sqrt((2.0 * l + 1.0) * (l - 1.0 - m) * (l - 1.0 + m) / ((2.0 * l - 3.0) * l2m2));
      value[tri(l, m)] = a * x * value[tri(l - 1, m)] - b * value[tri(l - 2, m)];
    }
  }
  if (!with_derivatives) return;

  d1.assign(n_top, 0.0);
  ladder_derivative(value, d1, top);
  d2.assign(n_top, 0.0);
  ladder_derivative(d1, d2, lmax);

  // m Pbar_l^m / sin = c_l (C Pbar_{l+1}^{m+1} + D Pbar_{l+1}^{m-1}) / 2,
  //   c_l = sqrt((2l+1)/(2l+3)), C = sqrt((l+m+1)(l+m+2)), D = sqrt((l-m+1)(l-m+2)).
  msin.assign(tri(lmax, lmax) + 1, 0.0);
  dmsin.assign(tri(lmax, lmax) + 1, 0.0);
  for (int l = 1; l <= lmax; ++l) {
    const double c = 0.5 * std::sqrt((2.0 * l + 1.0) / (2.0 * l + 3.0));
    for (int m = 1; m <= l; ++m) {
      const double up = std::sqrt(double(l + m + 1) * (l + m + 2));
      const double down = std::sqrt(double(l - m + 1) * (l - m + 2));
      msin[tri(l, m)] = c * (up * value[tri(l + 1, m + 1)] + down * value[tri(l + 1, m - 1)]);
      dmsin[tri(l, m)] = c * (up * d1[tri(l + 1, m + 1)] + down * d1[tri(l + 1, m - 1)]);
    }
  }
}

}  // namespace centroflow::detail
