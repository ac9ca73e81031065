#pragma once

#include <cmath>
#include <functional>

namespace cuspmin::quadrature {

inline constexpr double kDefaultTolerance = 1e-10;

namespace detail {

template <typename F>
double simpson_step(const F& f, double a, double b, double fa, double fm, double fb, double whole,
                    double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson rule with Richardson correction. `tol` is an absolute tolerance.
/// The integrand is sampled at the endpoints, so it must be finite there.
template <typename F>
double adaptive_simpson(const F& f, double a, double b, double tol = kDefaultTolerance,
                        int max_depth = 48) {
  if (a == b) return 0.0;
  if (b < a) return -adaptive_simpson(f, b, a, tol, max_depth);
  // Two panels up front so a symmetric integrand cannot fool the first error estimate.
  const double m = 0.5 * (a + b);
  auto panel = [&](double lo, double hi) {
    const double fl = f(lo);
    const double fh = f(hi);
    const double fm = f(0.5 * (lo + hi));
    const double whole = (hi - lo) / 6.0 * (fl + 4.0 * fm + fh);
    return detail::simpson_step(f, lo, hi, fl, fm, fh, whole, 0.5 * tol, max_depth);
  };
  return panel(a, m) + panel(m, b);
}

}  // namespace cuspmin::quadrature
