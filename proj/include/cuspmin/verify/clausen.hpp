#pragma once

#include <cmath>
#include <numbers>

#include <boost/math/special_functions/zeta.hpp>

// Lobachevsky function by its zeta-series expansion, independent of the quadrature
// in ideal_tetrahedron.hpp:
//   L(t) = t (1 - ln 2t) + sum_k zeta(2k) t^(2k+1) / (k (2k+1) pi^(2k)),  0 < t <= pi/2.

namespace cuspmin::verify {

inline double lobachevsky_series(double theta) {
  constexpr double pi = std::numbers::pi;
  double t = std::fmod(theta, pi);
  if (t < 0) t += pi;
  double sign = 1.0;
  if (t > pi / 2) {
    t = pi - t;
    sign = -1.0;
  }
  if (t == 0.0) return 0.0;
  double sum = t * (1.0 - std::log(2.0 * t));
  const double r = (t / pi) * (t / pi);
  double pw = t * r;
  for (int k = 1; k <= 60; ++k) {
    const double term = boost::math::zeta(2.0 * k) * pw / (k * (2.0 * k + 1.0));
    sum += term;
    if (std::abs(term) < 1e-18) break;
    pw *= r;
  }
  return sign * sum;
}

}  // namespace cuspmin::verify
