#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "cuspmin/errors.hpp"

namespace cuspmin {

using cplx = std::complex<double>;

/// A point of the Riemann sphere: finite, or infinity.
class ExtComplex {
 public:
  ExtComplex() = default;
  ExtComplex(cplx z) : z_(z) {}  // NOLINT(google-explicit-constructor)
  ExtComplex(double x) : z_(x, 0.0) {}  // NOLINT(google-explicit-constructor)

  static ExtComplex infinity() {
    ExtComplex e;
    e.inf_ = true;
    return e;
  }

  bool is_infinite() const { return inf_; }
  cplx value() const {
    if (inf_) throw DomainError("the point at infinity has no finite value");
    return z_;
  }

  friend bool operator==(const ExtComplex& a, const ExtComplex& b) {
    return a.inf_ == b.inf_ && (a.inf_ || a.z_ == b.z_);
  }

 private:
  cplx z_{0.0, 0.0};
  bool inf_ = false;
};

/// Chordal-free comparison: both infinite, or both finite and within tol.
inline bool near(const ExtComplex& a, const ExtComplex& b, double tol) {
  if (a.is_infinite() && b.is_infinite()) return true;
  if (a.is_infinite()) return std::abs(b.value()) * tol >= 1.0;
  if (b.is_infinite()) return std::abs(a.value()) * tol >= 1.0;
  return std::abs(a.value() - b.value()) <= tol;
}

/// Element of SL2(C), acting by (a z + b) / (c z + d).
class MobiusMap {
 public:
  MobiusMap() = default;

  /// Normalizes to determinant 1; rejects singular matrices.
  MobiusMap(cplx a, cplx b, cplx c, cplx d) : a_(a), b_(b), c_(c), d_(d) { normalize(); }

  static MobiusMap identity() { return {}; }
  static MobiusMap translation(cplx w) { return {1.0, w, 0.0, 1.0}; }

  /// The map sending (z1, z2, z3) to (0, 1, infinity). Points must be distinct.
  static MobiusMap to_standard(const ExtComplex& z1, const ExtComplex& z2, const ExtComplex& z3);

  /// The map sending (z1, z2, z3) to (w1, w2, w3).
  static MobiusMap three_point(const ExtComplex& z1, const ExtComplex& z2, const ExtComplex& z3,
                               const ExtComplex& w1, const ExtComplex& w2, const ExtComplex& w3) {
    return compose(to_standard(w1, w2, w3).inverse(), to_standard(z1, z2, z3));
  }

  cplx a() const { return a_; }
  cplx b() const { return b_; }
  cplx c() const { return c_; }
  cplx d() const { return d_; }
  cplx trace() const { return a_ + d_; }
  cplx determinant() const { return a_ * d_ - b_ * c_; }

  ExtComplex apply(const ExtComplex& z) const {
    if (z.is_infinite()) {
      if (c_ == cplx(0.0)) return ExtComplex::infinity();
      return a_ / c_;
    }
    const cplx den = c_ * z.value() + d_;
    if (den == cplx(0.0)) return ExtComplex::infinity();
    return (a_ * z.value() + b_) / den;
  }

  MobiusMap inverse() const { return {d_, -b_, -c_, a_}; }

  friend MobiusMap compose(const MobiusMap& m1, const MobiusMap& m2) {
    return {m1.a_ * m2.a_ + m1.b_ * m2.c_, m1.a_ * m2.b_ + m1.b_ * m2.d_,
            m1.c_ * m2.a_ + m1.d_ * m2.c_, m1.c_ * m2.b_ + m1.d_ * m2.d_};
  }
  friend MobiusMap operator*(const MobiusMap& m1, const MobiusMap& m2) { return compose(m1, m2); }

  /// Largest entrywise distance to m or to -m (the projective ambiguity).
  double distance(const MobiusMap& m) const {
    auto dist = [&](double s) {
      return std::max({std::abs(a_ - s * m.a_), std::abs(b_ - s * m.b_), std::abs(c_ - s * m.c_),
                       std::abs(d_ - s * m.d_)});
    };
    return std::min(dist(1.0), dist(-1.0));
  }

  MobiusMap power(int n) const {
    MobiusMap base = n < 0 ? inverse() : *this;
    MobiusMap out;
    for (int k = 0; k < std::abs(n); ++k) out = out * base;
    return out;
  }

 private:
  void normalize() {
    const cplx det = a_ * d_ - b_ * c_;
    if (std::abs(det) < 1e-300) throw ArgumentError("singular Mobius matrix");
    const cplx s = std::sqrt(det);
    a_ /= s;
    b_ /= s;
    c_ /= s;
    d_ /= s;
  }

  cplx a_{1.0}, b_{0.0}, c_{0.0}, d_{1.0};
};

inline MobiusMap MobiusMap::to_standard(const ExtComplex& z1, const ExtComplex& z2, const ExtComplex& z3) {
  // (z - z1)(z2 - z3) / ((z - z3)(z2 - z1)), with factors involving infinity dropped.
  if (z1 == z2 || z2 == z3 || z1 == z3) throw ArgumentError("three-point map needs distinct points");
  if (z1.is_infinite()) return {0.0, z2.value() - z3.value(), 1.0, -z3.value()};
  if (z2.is_infinite()) return {1.0, -z1.value(), 1.0, -z3.value()};
  if (z3.is_infinite()) return {1.0, -z1.value(), 0.0, z2.value() - z1.value()};
  const cplx p = z2.value() - z3.value(), q = z2.value() - z1.value();
  return {p, -z1.value() * p, q, -z3.value() * q};
}

inline constexpr double kParabolicTol = 1e-10;

/// Trace +-2 and not +-identity.
inline bool is_parabolic(const MobiusMap& m, double tol = kParabolicTol) {
  const cplx tr = m.trace();
  const bool trace_ok = std::abs(tr - 2.0) <= tol || std::abs(tr + 2.0) <= tol;
  return trace_ok && m.distance(MobiusMap::identity()) > tol;
}

/// The unique fixed point of a parabolic map.
inline ExtComplex fixed_point(const MobiusMap& m) {
  if (!is_parabolic(m)) throw ClassificationError("fixed_point requires a parabolic map");
  if (std::abs(m.c()) <= 1e-14 * std::max(1.0, std::abs(m.a()))) return ExtComplex::infinity();
  return (m.a() - m.d()) / (2.0 * m.c());
}

/// T_alpha = [[1, w], [0, 1]] together with a trace-2 T_beta; T_gamma = T_alpha T_beta.
struct ParabolicTriple {
  cplx w;
  MobiusMap beta;
  int branch = -2;  ///< trace of T_alpha T_beta

  MobiusMap alpha() const { return MobiusMap::translation(w); }
  MobiusMap gamma() const { return compose(alpha(), beta); }
};

/// Branch -2 solution: d = 2 - a, c = -4/w, b = (ad - 1)/c.
inline ParabolicTriple solve_triple(cplx w, cplx a) {
  if (std::abs(w) == 0.0) throw ArgumentError("solve_triple needs w != 0");
  const cplx d = 2.0 - a;
  const cplx c = -4.0 / w;
  const cplx b = (a * d - 1.0) / c;
  return {w, MobiusMap(a, b, c, d), -2};
}

/// Branch +2 (c = 0): T_beta = [[1, b], [0, 1]], a translation sharing the fixed point infinity.
inline ParabolicTriple degenerate_triple(cplx w, cplx b) {
  if (std::abs(w) == 0.0) throw ArgumentError("degenerate_triple needs w != 0");
  return {w, MobiusMap(1.0, b, 0.0, 1.0), 2};
}

/// A line {base + t dir} union infinity, or a round circle.
struct BoundaryCircle {
  enum class Kind { line, circle };
  Kind kind = Kind::line;
  cplx base{0.0};
  cplx direction{1.0};
  cplx center{0.0};
  double radius = 1.0;

  static BoundaryCircle line(cplx p, cplx dir) {
    if (std::abs(dir) == 0.0) throw ArgumentError("line direction must be nonzero");
    return {Kind::line, p, dir, 0.0, 1.0};
  }
  static BoundaryCircle circle(cplx c, double r) {
    if (!(r > 0.0)) throw ArgumentError("circle radius must be positive");
    return {Kind::circle, 0.0, 1.0, c, r};
  }

  /// Real parameter t of the orthogonal projection of z onto a line.
  double parameter(cplx z) const { return std::real((z - base) / direction); }

  double distance(const ExtComplex& z) const {
    if (z.is_infinite()) {
      return kind == Kind::line ? 0.0 : std::numeric_limits<double>::infinity();
    }
    if (kind == Kind::circle) return std::abs(std::abs(z.value() - center) - radius);
    const cplx u = direction / std::abs(direction);
    return std::abs(std::imag((z.value() - base) * std::conj(u)));
  }
};

/// x_beta = w (d - a) / 8 with direction w.
inline BoundaryCircle invariant_circle(const ParabolicTriple& t) {
  if (t.branch != -2) {
    throw DegenerateBranchError("branch +2 has a common fixed point at infinity and no invariant circle");
  }
  return BoundaryCircle::line(t.w * (t.beta.d() - t.beta.a()) / 8.0, t.w);
}

struct OrbitLevel {
  int word_length = 0;
  std::size_t count = 0;
  double max_distance = 0.0;
  double median_distance = 0.0;
};

struct OrbitSample {
  std::vector<ExtComplex> points;  ///< images by words of length exactly word_length
  std::vector<OrbitLevel> levels;  ///< per word length 1..word_length
};

inline constexpr int kMaxWordLength = 12;

/// Applies every reduced word in {T_alpha^+-1, T_beta^+-1} of length 1..word_length to the
/// seeds and summarizes the distance to the invariant circle per length.
inline OrbitSample orbit_limit_sample(const ParabolicTriple& t, int word_length,
                                      const std::vector<ExtComplex>& seeds) {
  if (word_length < 1) throw ArgumentError("word_length must be >= 1");
  if (word_length > kMaxWordLength) throw ArgumentError("word_length > 12 rejected");
  const BoundaryCircle line = invariant_circle(t);
  const std::array<MobiusMap, 4> gens{t.alpha(), t.alpha().inverse(), t.beta, t.beta.inverse()};
  std::vector<std::vector<double>> dist(word_length + 1);
  OrbitSample out;

  // Depth-first over reduced words; generator g and g^-1 differ in the low bit.
  struct Frame {
    MobiusMap m;
    int last;
    int depth;
  };
  std::vector<Frame> stack;
  for (int g = 3; g >= 0; --g) stack.push_back({gens[g], g, 1});
  while (!stack.empty()) {
    const Frame f = stack.back();
    stack.pop_back();
    for (const auto& s : seeds) {
      const ExtComplex img = f.m.apply(s);
      dist[f.depth].push_back(line.distance(img));
      if (f.depth == word_length) out.points.push_back(img);
    }
    if (f.depth == word_length) continue;
    for (int g = 3; g >= 0; --g) {
      if ((g ^ 1) == f.last) continue;
      stack.push_back({compose(f.m, gens[g]), g, f.depth + 1});
    }
  }
  for (int k = 1; k <= word_length; ++k) {
    auto& d = dist[k];
    OrbitLevel lv;
    lv.word_length = k;
    lv.count = d.size();
    if (!d.empty()) {
      lv.max_distance = *std::max_element(d.begin(), d.end());
      const auto mid = d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2);
      std::nth_element(d.begin(), mid, d.end());
      lv.median_distance = *mid;
      if (d.size() % 2 == 0) {
        lv.median_distance = 0.5 * (lv.median_distance + *std::max_element(d.begin(), mid));
      }
    }
    out.levels.push_back(lv);
  }
  return out;
}

inline nlohmann::json complex_json(cplx z) { return nlohmann::json::array({z.real(), z.imag()}); }

inline nlohmann::json ext_json(const ExtComplex& z) {
  if (z.is_infinite()) return "inf";
  return complex_json(z.value());
}

inline nlohmann::json mobius_json(const MobiusMap& m) {
  return {{"a", complex_json(m.a())}, {"b", complex_json(m.b())}, {"c", complex_json(m.c())},
          {"d", complex_json(m.d())}};
}

}  // namespace cuspmin
