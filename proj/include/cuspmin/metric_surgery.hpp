#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "cuspmin/cusp_geometry.hpp"
#include "cuspmin/errors.hpp"
#include "cuspmin/psi_profile.hpp"
#include "cuspmin/quadrature.hpp"

namespace cuspmin {

struct LatticeCoefficients {
  double a = 1.0;  ///< |v1| / 2 pi
  double b = 0.0;  ///< <v1, v2> / 4 pi^2
  double c = 1.0;  ///< |v2| / 2 pi
};

/// Coefficients of the flat torus metric in angular coordinates (u, v) in S^1 x S^1,
/// where (x, y) = u v1 / 2pi + v v2 / 2pi.
inline LatticeCoefficients lattice_coefficients(const CuspEnd& end) {
  const double two_pi = 2.0 * std::numbers::pi;
  return {end.v1().norm() / two_pi, end.v1().dot(end.v2()) / (two_pi * two_pi), end.v2().norm() / two_pi};
}

/// Non-increasing collar function on [L, L+1]: 1 on [L, L + flat_width], the linear
/// form (L+1-z)/a on [L+1-linear_width, L+1], a quintic Hermite blend between (C^2
/// at both joins).
class PhiProfile {
 public:
  PhiProfile(double L, double a_coeff, double flat_width = 0.25, double linear_width = 0.25)
      : L_(L), a_(a_coeff), fw_(flat_width), lw_(linear_width) {
    if (!(L >= 1.0)) throw ArgumentError("collar start L must be >= 1");
    if (!(a_coeff > 0.0)) throw ArgumentError("lattice coefficient a must be positive");
    if (!(fw_ > 0.0 && lw_ > 0.0 && fw_ + lw_ < 1.0)) {
      throw ArgumentError("phi zone widths must be positive with flat + linear < 1");
    }
    if (!(lw_ < a_)) {
      std::ostringstream msg;
      msg << "linear zone width " << lw_ << " must be below a = " << a_ << " so that phi <= 1";
      throw ArgumentError(msg.str());
    }
    // The blend is a polynomial; sampling its derivative decides monotonicity.
    constexpr int kSamples = 4000;
    for (int i = 0; i <= kSamples; ++i) {
      const double z = L_ + fw_ + (1.0 - fw_ - lw_) * i / kSamples;
      if (d1(z) > 1e-14) throw ArgumentError("phi blend is not monotone for these zone widths");
    }
  }

  double L() const { return L_; }
  double a_coeff() const { return a_; }
  double flat_width() const { return fw_; }
  double linear_width() const { return lw_; }

  double operator()(double z) const {
    check(z);
    if (z <= L_ + fw_) return 1.0;
    if (z >= L_ + 1.0 - lw_) return (L_ + 1.0 - z) / a_;
    const double h = blend_width(), t = (z - L_ - fw_) / h;
    const double t3 = t * t * t, t4 = t3 * t, t5 = t4 * t;
    const double h1 = 10 * t3 - 15 * t4 + 6 * t5;
    const double g1 = -4 * t3 + 7 * t4 - 3 * t5;
    return (1.0 - h1) + y1() * h1 + h * s1() * g1;
  }

  double d1(double z) const {
    check(z);
    if (z <= L_ + fw_) return 0.0;
    if (z >= L_ + 1.0 - lw_) return -1.0 / a_;
    const double h = blend_width(), t = (z - L_ - fw_) / h;
    const double t2 = t * t, t3 = t2 * t, t4 = t3 * t;
    const double dh1 = 30 * t2 - 60 * t3 + 30 * t4;
    const double dg1 = -12 * t2 + 28 * t3 - 15 * t4;
    return ((y1() - 1.0) * dh1) / h + s1() * dg1;
  }

  friend bool operator==(const PhiProfile&, const PhiProfile&) = default;

 private:
  void check(double z) const {
    if (!(z >= kChartFloor)) throw DomainError("phi evaluated below the cusp chart");
    if (!(z < L_ + 1.0)) throw ChartError("phi evaluated at or beyond the core z = L+1");
  }
  double blend_width() const { return 1.0 - fw_ - lw_; }
  double y1() const { return lw_ / a_; }
  double s1() const { return -1.0 / a_; }

  double L_;
  double a_;
  double fw_;
  double lw_;
};

/// The surgered cusp metric on {1/2 <= z < L+1} in (u, v, z) coordinates.
struct SurgeryMetric {
  PsiProfile psi = PsiProfile::identity();
  PhiProfile phi;
  double a = 1.0;
  double b = 0.0;
  double c = 1.0;

  SurgeryMetric(PsiProfile psi_, PhiProfile phi_, LatticeCoefficients k)
      : psi(std::move(psi_)), phi(std::move(phi_)), a(k.a), b(k.b), c(k.c) {
    if (!(a > 0.0 && c > 0.0)) throw ArgumentError("lattice coefficients a, c must be positive");
    if (!(b * b < a * a * c * c)) throw ArgumentError("lattice coefficients violate b^2 < a^2 c^2");
    if (phi.a_coeff() != a) throw ArgumentError("phi must use the metric's coefficient a");
  }

  /// Convenience: coefficients from the end, default zone widths.
  static SurgeryMetric from_end(const PsiProfile& psi, const CuspEnd& end, double L, double flat_width = 0.25,
                                double linear_width = 0.25) {
    const auto k = lattice_coefficients(end);
    return SurgeryMetric(psi, PhiProfile(L, k.a, flat_width, linear_width), k);
  }

  double L() const { return phi.L(); }
};

/// (1/Psi^2) [[a^2 phi^2, b phi, 0], [b phi, c^2, 0], [0, 0, 1]]; phi = 1 below L.
inline MetricTensor surgery_metric_eval(const SurgeryMetric& sm, double /*u*/, double /*v*/, double z) {
  if (!(z < sm.L() + 1.0)) throw ChartError("surgered metric is defined only for z < L+1");
  const double s = sm.psi(z);
  const double f = z < sm.L() ? 1.0 : sm.phi(z);
  Eigen::Matrix3d g;
  g << sm.a * sm.a * f * f, sm.b * f, 0.0, sm.b * f, sm.c * sm.c, 0.0, 0.0, 0.0, 1.0;
  return {g / (s * s)};
}

/// Metric in (r, theta, v) on the solid torus, through h(r, theta, v) = (theta, v, L+1-r).
/// Valid in the linear-phi collar, r in [0, linear_width], including the core r = 0.
inline MetricTensor solid_torus_pullback(const SurgeryMetric& sm, double r, double /*theta*/, double /*v*/) {
  if (!(r >= 0.0 && r <= sm.phi.linear_width())) {
    throw ChartError("solid-torus chart needs 0 <= r <= linear zone width");
  }
  const double s = sm.psi(sm.L() + 1.0 - r);
  Eigen::Matrix3d g;
  g << 1.0, 0.0, 0.0, 0.0, r * r, sm.b / sm.a * r, 0.0, sm.b / sm.a * r, sm.c * sm.c;
  return {g / (s * s)};
}

/// Mean curvature Psi' - phi' Psi / (2 phi) of the level torus {z = const}; reduces to
/// Psi' below L and diverges at the core.
inline double surgery_mean_curvature(const SurgeryMetric& sm, double z) {
  if (!(z < sm.L() + 1.0)) throw ChartError("surgery mean curvature needs z < L+1");
  if (z < sm.L()) return sm.psi.d1(z);
  return sm.psi.d1(z) - sm.phi.d1(z) / (2.0 * sm.phi(z)) * sm.psi(z);
}

struct CoreRatio {
  double circumference = 0.0;  ///< length of the theta-circle at radius r
  double radius = 0.0;         ///< Riemannian distance from the core
  double ratio = 0.0;
};

/// Circumference / geodesic radius of the theta-circle at coordinate radius r; tends
/// to 2 pi exactly when the core carries no cone angle.
inline CoreRatio core_smoothness_ratio(const SurgeryMetric& sm, double r) {
  if (!(r > 0.0 && r <= sm.phi.linear_width())) throw ChartError("core ratio needs 0 < r <= linear zone width");
  const double top = sm.L() + 1.0;
  CoreRatio out;
  out.circumference = 2.0 * std::numbers::pi * r / sm.psi(top - r);
  out.radius = quadrature::adaptive_simpson([&](double s) { return 1.0 / sm.psi(top - s); }, 0.0, r, 1e-14 * r);
  out.ratio = out.circumference / out.radius;
  return out;
}

enum class PsiNFlavor { filling, isotopy };

/// filling: Psi_n(z) = n Psi(z/n), base critical at 2. isotopy: Psi_n(z) = 3n Psi(z/3n),
/// base critical at 4/3.
inline PsiProfile psi_n_profile(const PsiProfile& base, int n, PsiNFlavor flavor) {
  if (n < 1) throw ArgumentError("psi_n_profile needs n >= 1");
  const double need = flavor == PsiNFlavor::filling ? 2.0 : 4.0 / 3.0;
  const auto crit = base.critical_points();
  const bool has = std::any_of(crit.begin(), crit.end(), [&](double z) { return std::abs(z - need) < 1e-12; });
  if (!has) {
    std::ostringstream msg;
    msg << "base profile must have Psi'(" << need << ") = 0";
    throw ArgumentError(msg.str());
  }
  const double k = flavor == PsiNFlavor::filling ? n : 3.0 * n;
  return base.scaled(k, k);
}

inline std::string to_string(PsiNFlavor f) { return f == PsiNFlavor::filling ? "filling" : "isotopy"; }

inline PsiNFlavor psi_n_flavor_from_string(const std::string& s) {
  if (s == "filling") return PsiNFlavor::filling;
  if (s == "isotopy") return PsiNFlavor::isotopy;
  throw ArgumentError("unknown psi_n flavor '" + s + "'");
}

inline void to_json(nlohmann::json& j, const SurgeryMetric& sm) {
  nlohmann::json psi;
  to_json(psi, sm.psi);
  j = {{"psi", psi},
       {"L", sm.L()},
       {"a", sm.a},
       {"b", sm.b},
       {"c", sm.c},
       {"phi", {{"flat_width", sm.phi.flat_width()}, {"linear_width", sm.phi.linear_width()}}}};
}

/// Accepts either explicit {a, b, c} or a "lattice" [[v1], [v2]].
inline SurgeryMetric surgery_metric_from_json(const nlohmann::json& j) {
  const PsiProfile psi = psi_profile_from_json(j.at("psi"));
  const double L = j.at("L").get<double>();
  LatticeCoefficients k;
  if (j.contains("lattice")) {
    k = lattice_coefficients(cusp_end_from_json(j.at("lattice")));
  } else {
    k = {j.at("a").get<double>(), j.at("b").get<double>(), j.at("c").get<double>()};
  }
  const nlohmann::json zones = j.value("phi", nlohmann::json::object());
  return SurgeryMetric(psi, PhiProfile(L, k.a, zones.value("flat_width", 0.25), zones.value("linear_width", 0.25)),
                       k);
}

}  // namespace cuspmin
