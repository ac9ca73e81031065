#pragma once

#include <cmath>
#include <functional>

#include <Eigen/Core>

// Mean curvature of a level set {x3 = c} read off from how the area of one period
// cell changes under unit-speed normal displacement. Consumes only the metric field.

namespace cuspmin::verify {

/// Metric in a frame (s, t, c) where the surfaces of interest are {c = const} and the
/// metric does not depend on (s, t).
using LevelMetric = std::function<Eigen::Matrix3d(double c)>;

/// Normalized mean curvature -(1/2) d(ln area)/d(arclength) w.r.t. the normal pointing
/// toward increasing c. Requires g(c) block-diagonal between (s, t) and c.
inline double level_mean_curvature_fd(const LevelMetric& g, double c, double h) {
  auto log_area = [&](double cc) {
    const Eigen::Matrix3d m = g(cc);
    return 0.5 * std::log(m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0));
  };
  const double dlog = (log_area(c - 2 * h) - log_area(c + 2 * h) + 8.0 * (log_area(c + h) - log_area(c - h))) /
                      (12.0 * h);
  const double speed = std::sqrt(g(c)(2, 2));
  return -0.5 * dlog / speed;
}

}  // namespace cuspmin::verify
