#pragma once

#include <array>
#include <functional>

#include <Eigen/Core>
#include <Eigen/LU>

// Finite-difference curvature of an arbitrary metric on R^3. Independent of the
// analytic formulas: only the metric tensor field is consumed.

namespace cuspmin::verify {

using MetricField = std::function<Eigen::Matrix3d(const Eigen::Vector3d&)>;
using Christoffel = std::array<Eigen::Matrix3d, 3>;  // gamma[k](i, j) = Gamma^k_{ij}

namespace detail {

// Fourth-order central difference of a matrix-valued field along axis `dir`.
template <typename F>
auto d_axis(const F& f, const Eigen::Vector3d& x, int dir, double h) {
  Eigen::Vector3d e = Eigen::Vector3d::Zero();
  e[dir] = h;
  return ((f(x - 2 * e) - f(x + 2 * e)) + 8.0 * (f(x + e) - f(x - e))) / (12.0 * h);
}

}  // namespace detail

inline Christoffel christoffel_fd(const MetricField& g, const Eigen::Vector3d& x, double h) {
  std::array<Eigen::Matrix3d, 3> dg;
  for (int m = 0; m < 3; ++m) dg[m] = detail::d_axis(g, x, m, h);
  const Eigen::Matrix3d ginv = g(x).inverse();
  Christoffel gamma;
  for (int k = 0; k < 3; ++k) {
    gamma[k].setZero();
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int l = 0; l < 3; ++l)
          gamma[k](i, j) += 0.5 * ginv(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
  }
  return gamma;
}

/// Sectional curvature of the coordinate plane (e_a, e_b) at x, from Christoffel
/// symbols differenced once more.
inline double sectional_curvature_fd(const MetricField& g, const Eigen::Vector3d& x, int a, int b,
                                     double h = 1e-3) {
  const Christoffel gamma = christoffel_fd(g, x, h);
  std::array<Christoffel, 3> dgamma;
  for (int m = 0; m < 3; ++m) {
    Eigen::Vector3d e = Eigen::Vector3d::Zero();
    e[m] = h;
    const Christoffel p1 = christoffel_fd(g, x + e, h), m1 = christoffel_fd(g, x - e, h);
    const Christoffel p2 = christoffel_fd(g, x + 2 * e, h), m2 = christoffel_fd(g, x - 2 * e, h);
    for (int k = 0; k < 3; ++k)
      dgamma[m][k] = ((m2[k] - p2[k]) + 8.0 * (p1[k] - m1[k])) / (12.0 * h);
  }
  // R^r_{s m n} = d_m G^r_{n s} - d_n G^r_{m s} + G^r_{m l} G^l_{n s} - G^r_{n l} G^l_{m s}
  auto riemann_up = [&](int r, int s, int m, int n) {
    double v = dgamma[m][r](n, s) - dgamma[n][r](m, s);
    for (int l = 0; l < 3; ++l) v += gamma[r](m, l) * gamma[l](n, s) - gamma[r](n, l) * gamma[l](m, s);
    return v;
  };
  const Eigen::Matrix3d gx = g(x);
  double num = 0.0;
  for (int r = 0; r < 3; ++r) num += gx(a, r) * riemann_up(r, b, a, b);
  return num / (gx(a, a) * gx(b, b) - gx(a, b) * gx(a, b));
}

}  // namespace cuspmin::verify
