#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

#include "cuspmin/errors.hpp"
#include "cuspmin/psi_profile.hpp"
#include "cuspmin/quadrature.hpp"

namespace cuspmin {

/// A point (x, y, z) of the cusp chart {z >= 1/2}.
struct CuspPoint {
  double x = 0.0;
  double y = 0.0;
  double z = 1.0;

  static CuspPoint checked(double x, double y, double z) {
    if (!(z >= kChartFloor)) {
      std::ostringstream msg;
      msg << "cusp point height " << z << " is below 1/2";
      throw DomainError(msg.str());
    }
    return {x, y, z};
  }

  Eigen::Vector3d vec() const { return {x, y, z}; }
};

/// Cusp end M / G(v1, v2): the chart {z >= 1/2} modulo two horizontal translations.
class CuspEnd {
 public:
  CuspEnd() : CuspEnd({1.0, 0.0}, {0.0, 1.0}) {}

  CuspEnd(const Eigen::Vector2d& v1, const Eigen::Vector2d& v2) : v1_(v1), v2_(v2) {
    if (!(std::abs(cross()) > 1e-14 * std::max(1.0, v1.norm() * v2.norm()))) {
      throw ArgumentError("lattice generators must be linearly independent");
    }
  }

  const Eigen::Vector2d& v1() const { return v1_; }
  const Eigen::Vector2d& v2() const { return v2_; }

  /// Lambda(C) = max(|v1|, |v2|), the quantity driven small by rescaling.
  double lambda() const { return std::max(v1_.norm(), v2_.norm()); }
  double shortest_generator() const { return std::min(v1_.norm(), v2_.norm()); }
  /// Euclidean area of the fundamental parallelogram, |v1 x v2|.
  double cell_area() const { return std::abs(cross()); }

  /// Horizontal translation i*v1 + j*v2 as a 3-vector.
  Eigen::Vector3d shift(int i, int j) const {
    const Eigen::Vector2d s = static_cast<double>(i) * v1_ + static_cast<double>(j) * v2_;
    return {s.x(), s.y(), 0.0};
  }

 private:
  double cross() const { return v1_.x() * v2_.y() - v1_.y() * v2_.x(); }

  Eigen::Vector2d v1_;
  Eigen::Vector2d v2_;
};

inline void to_json(nlohmann::json& j, const CuspEnd& e) {
  j = nlohmann::json::array({{e.v1().x(), e.v1().y()}, {e.v2().x(), e.v2().y()}});
}

inline CuspEnd cusp_end_from_json(const nlohmann::json& j) {
  const auto a = j.at(0).get<std::vector<double>>();
  const auto b = j.at(1).get<std::vector<double>>();
  if (a.size() != 2 || b.size() != 2) throw ArgumentError("lattice vectors must have two components");
  return CuspEnd({a[0], a[1]}, {b[0], b[1]});
}

/// Symmetric 3x3 tensor in an ordered coordinate frame.
struct MetricTensor {
  Eigen::Matrix3d g = Eigen::Matrix3d::Identity();

  bool is_symmetric(double tol = 1e-14) const {
    return (g - g.transpose()).cwiseAbs().maxCoeff() <= tol * std::max(1.0, g.cwiseAbs().maxCoeff());
  }

  /// Sylvester's criterion: all leading principal minors positive.
  bool is_positive_definite() const {
    const double m1 = g(0, 0);
    const double m2 = g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0);
    return m1 > 0.0 && m2 > 0.0 && g.determinant() > 0.0;
  }

  double determinant() const { return g.determinant(); }
};

/// g_Psi = |dX|^2 / Psi(z)^2 at p.
inline MetricTensor metric_eval(const PsiProfile& psi, const CuspPoint& p) {
  const double s = psi(p.z);
  return {Eigen::Matrix3d::Identity() / (s * s)};
}

struct SectionalCurvature {
  double horizontal = 0.0;  ///< (d_x, d_y) plane
  double vertical = 0.0;    ///< (d_x, d_z) and (d_y, d_z) planes
};

inline SectionalCurvature sectional_curvature(const PsiProfile& psi, double z) {
  const double p = psi(z);
  const double p1 = psi.d1(z);
  const double p2 = psi.d2(z);
  return {-p1 * p1, p * p2 - p1 * p1};
}

/// Mean curvature of the level torus T(z), normalized as the average of the principal
/// curvatures, with respect to the unit normal Psi(z) d_z pointing up the cusp.
inline double torus_mean_curvature(const PsiProfile& psi, double z) { return psi.d1(z); }

struct RescaledEnd {
  CuspEnd end;
  PsiProfile psi;
};

/// Chart change (x, y, z) -> (z0 x, z0 y, z0 z): the end becomes G(v1/z0, v2/z0) and
/// the profile becomes Psi(z0 z) / z0.
inline RescaledEnd rescale_end(const CuspEnd& end, const PsiProfile& psi, double z0) {
  if (!(z0 >= 1.0)) throw ArgumentError("rescaling factor z0 must be >= 1");
  return {CuspEnd(end.v1() / z0, end.v2() / z0), psi.scaled(1.0 / z0, 1.0 / z0)};
}

/// Length of the vertical segment from z1 to z2, the integral of dz / Psi(z).
inline double vertical_arc_length(const PsiProfile& psi, double z1, double z2,
                                  double tol = quadrature::kDefaultTolerance) {
  if (z1 > z2) throw ArgumentError("vertical_arc_length needs z1 <= z2");
  psi(z1);  // domain guard
  return quadrature::adaptive_simpson([&](double z) { return 1.0 / psi(z); }, z1, z2, tol);
}

struct TorusQuantities {
  double area = 0.0;
  double shortest_generator_length = 0.0;
};

inline TorusQuantities torus_quantities(const CuspEnd& end, const PsiProfile& psi, double z) {
  const double s = psi(z);
  return {end.cell_area() / (s * s), end.shortest_generator() / s};
}

}  // namespace cuspmin
