#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cuspmin/errors.hpp"

namespace cuspmin {

/// Lowest height of the cusp chart; every profile and metric rejects z below it.
inline constexpr double kChartFloor = 0.5;

enum class PsiFamily { identity, ramp, power };

/// Parameters of the C^2 ramp: identity up to `flat_end`, a quintic transition on
/// [flat_end, critical], and the constant `plateau` from `critical` on.
struct RampShape {
  double flat_end = 1.0;
  double critical = 2.0;
  double plateau = 1.5;
};

/// The deformation function of the cusp metric g = |dX|^2 / Psi(z)^2.
///
/// A profile is a base function B from one of the families, composed with an affine
/// rescaling: Psi(z) = outer * B(z / inner). Rescaling keeps derivatives analytic, so
/// `scaled` composes exactly and the bounds B1 >= sup|Psi'| and B2 >= sup|Psi Psi''|
/// transform in closed form.
class PsiProfile {
 public:
  static PsiProfile identity() { return PsiProfile(PsiFamily::identity); }

  /// Ramp with Psi' >= 0 throughout; requires the normalized plateau gain
  /// (plateau - flat_end) / (critical - flat_end) to be at least 0.4.
  static PsiProfile ramp(double flat_end, double critical, double plateau) {
    if (!(flat_end > 0.0) || !(critical > flat_end)) {
      throw ArgumentError("ramp profile needs 0 < flat_end < critical");
    }
    const double gain = (plateau - flat_end) / (critical - flat_end);
    if (!(gain >= kMinRampGain - 1e-12)) {
      std::ostringstream msg;
      msg << "ramp profile with gain " << gain << " < " << kMinRampGain << " is not monotone";
      throw ArgumentError(msg.str());
    }
    PsiProfile p(PsiFamily::ramp);
    p.ramp_ = RampShape{flat_end, critical, plateau};
    p.compute_ramp_bounds();
    return p;
  }

  /// Psi(z) = z^exponent. A test profile: it ignores the [1/2, 1] normalization.
  static PsiProfile power(double exponent) {
    if (!(exponent > 0.0)) throw ArgumentError("power profile needs a positive exponent");
    PsiProfile p(PsiFamily::power);
    p.exponent_ = exponent;
    if (exponent == 1.0) {
      p.base_b1_ = 1.0;
      p.base_b2_ = 0.0;
    } else {
      p.base_b1_ = std::numeric_limits<double>::infinity();
      p.base_b2_ = std::numeric_limits<double>::infinity();
    }
    return p;
  }

  double operator()(double z) const { return outer_ * base(checked(z) / inner_); }
  double d1(double z) const { return outer_ / inner_ * base_d1(checked(z) / inner_); }
  double d2(double z) const { return outer_ / (inner_ * inner_) * base_d2(checked(z) / inner_); }

  /// B1 >= sup |Psi'| over the chart.
  double bound_d1() const { return outer_ / inner_ * base_b1_; }
  /// B2 >= sup |Psi Psi''| over the chart.
  double bound_psi_d2() const { return outer_ * outer_ / (inner_ * inner_) * base_b2_; }

  /// Heights where Psi' vanishes. For a ramp this is the start of the plateau;
  /// Psi' stays zero beyond it.
  std::vector<double> critical_points() const {
    if (family_ == PsiFamily::ramp) return {ramp_.critical * inner_};
    return {};
  }

  /// Joins where the profile is only C^2.
  std::vector<double> knots() const {
    if (family_ == PsiFamily::ramp) return {ramp_.flat_end * inner_, ramp_.critical * inner_};
    return {};
  }

  /// Psi_new(z) = outer * Psi(z / inner).
  PsiProfile scaled(double outer, double inner) const {
    if (!(outer > 0.0) || !(inner > 0.0)) throw ArgumentError("scale factors must be positive");
    PsiProfile p = *this;
    p.outer_ *= outer;
    p.inner_ *= inner;
    return p;
  }

  PsiFamily family() const { return family_; }
  const RampShape& ramp_shape() const { return ramp_; }
  double exponent() const { return exponent_; }
  double outer_scale() const { return outer_; }
  double inner_scale() const { return inner_; }

  friend bool operator==(const PsiProfile& a, const PsiProfile& b) {
    return a.family_ == b.family_ && a.ramp_.flat_end == b.ramp_.flat_end &&
           a.ramp_.critical == b.ramp_.critical && a.ramp_.plateau == b.ramp_.plateau &&
           a.exponent_ == b.exponent_ && a.outer_ == b.outer_ && a.inner_ == b.inner_;
  }

  static constexpr double kMinRampGain = 0.4;

 private:
  explicit PsiProfile(PsiFamily f) : family_(f) {}

  static double checked(double z) {
    if (!(z >= kChartFloor)) {
      std::ostringstream msg;
      msg << "height " << z << " is below the cusp chart (z >= 1/2)";
      throw DomainError(msg.str());
    }
    return z;
  }

  double gain() const { return (ramp_.plateau - ramp_.flat_end) / (ramp_.critical - ramp_.flat_end); }

  // Quintic Hermite transition on t in [0,1]: q(0)=0, q'(0)=1, q''(0)=0, q(1)=gain,
  // q'(1)=q''(1)=0. Its slope factors as (1-t)^2 (1 + 2t + (30 gain - 15) t^2).
  static double ramp_q(double t, double m) {
    const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
    return m * (10 * t3 - 15 * t4 + 6 * t5) + (t - 6 * t3 + 8 * t4 - 3 * t5);
  }
  static double ramp_dq(double t, double m) {
    const double s = 1.0 - t;
    return s * s * (1.0 + 2.0 * t + (30.0 * m - 15.0) * t * t);
  }
  static double ramp_d2q(double t, double m) {
    const double t2 = t * t, t3 = t2 * t;
    return m * (60 * t - 180 * t2 + 120 * t3) + (-36 * t + 96 * t2 - 60 * t3);
  }

  double base(double x) const {
    switch (family_) {
      case PsiFamily::identity: return x;
      case PsiFamily::power: return std::pow(x, exponent_);
      case PsiFamily::ramp: {
        if (x <= ramp_.flat_end) return x;
        if (x >= ramp_.critical) return ramp_.plateau;
        const double h = ramp_.critical - ramp_.flat_end;
        return ramp_.flat_end + h * ramp_q((x - ramp_.flat_end) / h, gain());
      }
    }
    return x;
  }

  double base_d1(double x) const {
    switch (family_) {
      case PsiFamily::identity: return 1.0;
      case PsiFamily::power: return exponent_ * std::pow(x, exponent_ - 1.0);
      case PsiFamily::ramp: {
        if (x <= ramp_.flat_end) return 1.0;
        if (x >= ramp_.critical) return 0.0;
        const double h = ramp_.critical - ramp_.flat_end;
        return ramp_dq((x - ramp_.flat_end) / h, gain());
      }
    }
    return 1.0;
  }

  double base_d2(double x) const {
    switch (family_) {
      case PsiFamily::identity: return 0.0;
      case PsiFamily::power: return exponent_ * (exponent_ - 1.0) * std::pow(x, exponent_ - 2.0);
      case PsiFamily::ramp: {
        if (x <= ramp_.flat_end || x >= ramp_.critical) return 0.0;
        const double h = ramp_.critical - ramp_.flat_end;
        return ramp_d2q((x - ramp_.flat_end) / h, gain()) / h;
      }
    }
    return 0.0;
  }

  void compute_ramp_bounds() {
    // Dense sampling of the two polynomials plus a relative margin that covers the
    // O(step^2) gap between a sampled and a true smooth maximum.
    constexpr int kSamples = 20000;
    const double h = ramp_.critical - ramp_.flat_end;
    const double m = gain();
    double b1 = 1.0, b2 = 0.0;
    for (int i = 0; i <= kSamples; ++i) {
      const double t = static_cast<double>(i) / kSamples;
      b1 = std::max(b1, std::abs(ramp_dq(t, m)));
      const double psi = ramp_.flat_end + h * ramp_q(t, m);
      b2 = std::max(b2, std::abs(psi * ramp_d2q(t, m) / h));
    }
    base_b1_ = b1 * (1.0 + 1e-6) + 1e-12;
    base_b2_ = b2 * (1.0 + 1e-6) + 1e-12;
  }

  PsiFamily family_ = PsiFamily::identity;
  RampShape ramp_{};
  double exponent_ = 1.0;
  double outer_ = 1.0;
  double inner_ = 1.0;
  double base_b1_ = 1.0;
  double base_b2_ = 0.0;
};

/// Psi(z) = z on [1/2, 1], checked on a grid.
inline bool is_normalized(const PsiProfile& psi, int samples = 1001, double tol = 1e-12) {
  for (int i = 0; i < samples; ++i) {
    const double z = kChartFloor + (1.0 - kChartFloor) * i / (samples - 1);
    if (std::abs(psi(z) - z) > tol) return false;
  }
  return true;
}

/// Psi' >= 0 on a grid over [1/2, z_max].
inline bool is_nondecreasing(const PsiProfile& psi, double z_max, int samples = 4001) {
  for (int i = 0; i < samples; ++i) {
    const double z = kChartFloor + (z_max - kChartFloor) * i / (samples - 1);
    if (psi.d1(z) < 0.0) return false;
  }
  return true;
}

inline std::string to_string(PsiFamily f) {
  switch (f) {
    case PsiFamily::identity: return "identity";
    case PsiFamily::ramp: return "ramp";
    case PsiFamily::power: return "power";
  }
  return "identity";
}

inline void to_json(nlohmann::json& j, const PsiProfile& p) {
  j = nlohmann::json{{"family", to_string(p.family())}};
  nlohmann::json params = nlohmann::json::object();
  if (p.family() == PsiFamily::ramp) {
    params = {{"flat_end", p.ramp_shape().flat_end},
              {"critical", p.ramp_shape().critical},
              {"plateau", p.ramp_shape().plateau}};
  } else if (p.family() == PsiFamily::power) {
    params = {{"exponent", p.exponent()}};
  }
  j["parameters"] = params;
  j["outer_scale"] = p.outer_scale();
  j["inner_scale"] = p.inner_scale();
}

inline PsiProfile psi_profile_from_json(const nlohmann::json& j) {
  const std::string family = j.at("family").get<std::string>();
  const nlohmann::json params = j.value("parameters", nlohmann::json::object());
  PsiProfile base = PsiProfile::identity();
  if (family == "identity") {
    base = PsiProfile::identity();
  } else if (family == "ramp") {
    base = PsiProfile::ramp(params.value("flat_end", 1.0), params.value("critical", 2.0),
                            params.value("plateau", 1.5));
  } else if (family == "power") {
    base = PsiProfile::power(params.at("exponent").get<double>());
  } else {
    throw ArgumentError("unknown profile family '" + family + "'");
  }
  const double outer = j.value("outer_scale", 1.0);
  const double inner = j.value("inner_scale", 1.0);
  if (outer == 1.0 && inner == 1.0) return base;
  return base.scaled(outer, inner);
}

}  // namespace cuspmin
