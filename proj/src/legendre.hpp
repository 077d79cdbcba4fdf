#pragma once

#include <cstddef>
#include <vector>

namespace centroflow::detail {

/// Gauss-Legendre abscissae (descending, in (-1, 1)) and weights on [-1, 1].
void gauss_legendre(int count, std::vector<double>& nodes, std::vector<double>& weights);

inline std::size_t tri(int l, int m) {
  return static_cast<std::size_t>(l) * static_cast<std::size_t>(l + 1) / 2 + static_cast<std::size_t>(m);
}

/// Normalized associated Legendre functions (orthonormal on [-1, 1], no
/// Condon-Shortley phase) and the derivative quantities needed for the
/// spherical covariant Hessian, evaluated at one colatitude.
///
/// All quantities are computed without dividing by sin(theta):
///   value  = Pbar_l^m
///   d1     = d/dtheta Pbar_l^m
///   d2     = d^2/dtheta^2 Pbar_l^m
///   msin   = m Pbar_l^m / sin(theta)
///   dmsin  = d/dtheta (m Pbar_l^m / sin(theta))
/// Arrays are indexed by tri(l, m) for 0 <= m <= l <= lmax.
struct LegendreColumn {
  int lmax = 0;
  std::vector<double> value, d1, d2, msin, dmsin;

  LegendreColumn(int lmax, double cos_theta, double sin_theta, bool with_derivatives);
};

}  // namespace centroflow::detail
