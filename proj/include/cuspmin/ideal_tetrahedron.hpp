#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>
#include <nlohmann/json.hpp>

#include "cuspmin/errors.hpp"
#include "cuspmin/mobius.hpp"
#include "cuspmin/quadrature.hpp"

namespace cuspmin {

enum class Model { klein, halfspace };

/// Boundary map from the unit sphere to C u {inf}: (x + iy) / (1 - z).
inline ExtComplex klein_to_halfspace(const Eigen::Vector3d& p) {
  const double den = 1.0 - p.z();
  if (std::abs(den) < 1e-15) return ExtComplex::infinity();
  return cplx(p.x() / den, p.y() / den);
}

inline Eigen::Vector3d halfspace_to_klein(const ExtComplex& z) {
  if (z.is_infinite()) return Eigen::Vector3d::UnitZ();
  const cplx w = z.value();
  const double n = std::norm(w);
  return Eigen::Vector3d(2.0 * w.real(), 2.0 * w.imag(), n - 1.0) / (n + 1.0);
}

/// Edges in a fixed order; opposite pairs are (0, 5), (1, 4), (2, 3).
inline constexpr std::array<std::pair<int, int>, 6> kTetraEdges{{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

/// Ideal tetrahedron; vertices are kept in both models.
class IdealTetrahedron {
 public:
  static IdealTetrahedron from_klein(const std::array<Eigen::Vector3d, 4>& v) {
    IdealTetrahedron t;
    t.model_ = Model::klein;
    for (int i = 0; i < 4; ++i) {
      if (std::abs(v[i].norm() - 1.0) > 1e-12) throw GeometryError("klein vertices must lie on the unit sphere");
      t.klein_[i] = v[i];
      t.half_[i] = klein_to_halfspace(v[i]);
    }
    t.check_distinct();
    return t;
  }

  static IdealTetrahedron from_halfspace(const std::array<ExtComplex, 4>& z) {
    IdealTetrahedron t;
    t.model_ = Model::halfspace;
    for (int i = 0; i < 4; ++i) {
      t.half_[i] = z[i];
      t.klein_[i] = halfspace_to_klein(z[i]);
    }
    t.check_distinct();
    return t;
  }

  Model model() const { return model_; }
  const std::array<Eigen::Vector3d, 4>& klein() const { return klein_; }
  const std::array<ExtComplex, 4>& halfspace() const { return half_; }

 private:
  void check_distinct() const {
    for (int i = 0; i < 4; ++i) {
      for (int j = i + 1; j < 4; ++j) {
        if ((klein_[i] - klein_[j]).norm() < 1e-12) throw GeometryError("ideal vertices must be distinct");
      }
    }
  }

  Model model_ = Model::klein;
  std::array<Eigen::Vector3d, 4> klein_{};
  std::array<ExtComplex, 4> half_{};
};

/// Vertices (1,1,1)/sqrt3 and the three sign flips with an even number of minus signs.
inline IdealTetrahedron regular_ideal_tetrahedron(Model model = Model::klein) {
  const double s = 1.0 / std::sqrt(3.0);
  const std::array<Eigen::Vector3d, 4> v{Eigen::Vector3d(s, s, s), Eigen::Vector3d(s, -s, -s),
                                         Eigen::Vector3d(-s, s, -s), Eigen::Vector3d(-s, -s, s)};
  if (model == Model::klein) return IdealTetrahedron::from_klein(v);
  std::array<ExtComplex, 4> z;
  for (int i = 0; i < 4; ++i) z[i] = klein_to_halfspace(v[i]);
  return IdealTetrahedron::from_halfspace(z);
}

/// Interior dihedral angle along edge (i, j), in [0, pi]. Sends z_i to infinity and
/// z_j to 0; the faces become vertical half-planes through 0 and the images P, Q of
/// the other two vertices, so the angle is |arg(P / Q)|. Concyclic vertices give 0 or pi.
inline double dihedral_angle(const IdealTetrahedron& tet, int i, int j) {
  if (i == j || i < 0 || j < 0 || i > 3 || j > 3) throw ArgumentError("edge must join two distinct vertices");
  const auto& z = tet.halfspace();
  MobiusMap m;
  if (z[i].is_infinite()) {
    m = MobiusMap(1.0, -z[j].value(), 0.0, 1.0);
  } else if (z[j].is_infinite()) {
    m = MobiusMap(0.0, 1.0, 1.0, -z[i].value());
  } else {
    m = MobiusMap(1.0, -z[j].value(), 1.0, -z[i].value());
  }
  std::array<int, 2> other{};
  int n = 0;
  for (int k = 0; k < 4; ++k) {
    if (k != i && k != j) other[n++] = k;
  }
  const ExtComplex p = m.apply(z[other[0]]), q = m.apply(z[other[1]]);
  if (p.is_infinite() || q.is_infinite() || std::abs(p.value()) == 0.0 || std::abs(q.value()) == 0.0) {
    throw GeometryError("coincident ideal vertices");
  }
  return std::abs(std::arg(p.value() / q.value()));
}

/// Angle between outward face normals, pi minus the interior angle.
inline double exterior_dihedral_angle(const IdealTetrahedron& tet, int i, int j) {
  return std::numbers::pi - dihedral_angle(tet, i, j);
}

/// Lobachevsky function -int_0^theta ln|2 sin t| dt. On [0, pi/2] the log singularity is
/// split off: ln(2 sin t) = ln(2t) + ln(sin t / t), with int_0^theta ln(2t) in closed form.
inline double lobachevsky(double theta) {
  const double pi = std::numbers::pi;
  double r = std::fmod(theta, pi);
  if (r < 0.0) r += pi;
  double sign = 1.0;
  if (r > 0.5 * pi) {
    r = pi - r;
    sign = -1.0;
  }
  if (r == 0.0) return 0.0;
  auto smooth = [](double t) { return t == 0.0 ? 0.0 : std::log(std::sin(t) / t); };
  const double singular = r * std::log(2.0 * r) - r;
  const double rest = quadrature::adaptive_simpson(smooth, 0.0, r, 1e-15);
  return sign * -(singular + rest);
}

struct TetraAngles {
  std::array<double, 6> edge{};  ///< interior angles in kTetraEdges order
  double alpha = 0.0;            ///< edges 01 and 23
  double beta = 0.0;             ///< edges 02 and 13
  double gamma = 0.0;            ///< edges 03 and 12
};

inline TetraAngles tetra_angles(const IdealTetrahedron& tet) {
  TetraAngles a;
  for (std::size_t e = 0; e < kTetraEdges.size(); ++e) {
    a.edge[e] = dihedral_angle(tet, kTetraEdges[e].first, kTetraEdges[e].second);
  }
  a.alpha = a.edge[0];
  a.beta = a.edge[1];
  a.gamma = a.edge[2];
  return a;
}

/// Volume L(alpha) + L(beta) + L(gamma); the angles at a vertex must sum to pi.
inline double tetra_volume(const IdealTetrahedron& tet, double tol = 1e-8) {
  const auto a = tetra_angles(tet);
  const double sum = a.alpha + a.beta + a.gamma;
  if (std::abs(sum - std::numbers::pi) > tol) {
    std::ostringstream msg;
    msg << "ideal tetrahedron angle sum " << sum << " differs from pi";
    throw GeometryError(msg.str());
  }
  return lobachevsky(a.alpha) + lobachevsky(a.beta) + lobachevsky(a.gamma);
}

// ---------------------------------------------------------------------------
// Klein-model volume quadrature

namespace detail {

using Gauss = boost::math::quadrature::gauss<double, 30>;

// Integral of f over the triangle (a, b, c) in reference coordinates, via the collapsed
// square q = a + u (b - a) + w (1 - u) (c - a) with Jacobian (1 - u).
template <typename F>
double reference_triangle_integral(const F& f, const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                                   const Eigen::Vector3d& c) {
  return Gauss::integrate(
      [&](double u) {
        return (1.0 - u) * Gauss::integrate(
                               [&](double w) {
                                 const Eigen::Vector3d q = a + u * (b - a) + w * (1.0 - u) * (c - a);
                                 return f(q);
                               },
                               0.0, 1.0);
      },
      0.0, 1.0);
}

}  // namespace detail

inline constexpr double kIdealTol = 1e-12;

/// Hyperbolic volume of the Klein-model tetrahedron (apex, a, b, c), volume form
/// dx / (1 - |x|^2)^2. The apex may be ideal; a, b, c must be interior. Coning from the
/// apex, X = V + s (Q - V), the s-integral is done in closed form when V is ideal:
/// int_0^1 s^2 ds / (1 - |X|^2)^2 = 1 / (alpha (1 - |Q|^2)), alpha = 2 (1 - V.Q).
inline double klein_cone_volume(const Eigen::Vector3d& apex, const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                                const Eigen::Vector3d& c) {
  for (const auto* q : {&a, &b, &c}) {
    if (!(q->norm() < 1.0 - kIdealTol)) throw ArgumentError("cone base vertices must be interior points");
  }
  if (apex.norm() > 1.0 + kIdealTol) throw ArgumentError("apex outside the closed ball");
  Eigen::Matrix3d m;
  m.col(0) = a - apex;
  m.col(1) = b - a;
  m.col(2) = c - a;
  const double jac = std::abs(m.determinant());
  if (jac == 0.0) return 0.0;
  const bool ideal = std::abs(apex.norm() - 1.0) <= kIdealTol;
  if (ideal) {
    return jac * detail::reference_triangle_integral(
                     [&](const Eigen::Vector3d& q) {
                       const double alpha = 2.0 * (1.0 - apex.dot(q));
                       return 1.0 / (alpha * (1.0 - q.squaredNorm()));
                     },
                     a, b, c);
  }
  return jac * detail::reference_triangle_integral(
                   [&](const Eigen::Vector3d& q) {
                     return detail::Gauss::integrate(
                         [&](double s) {
                           const Eigen::Vector3d x = apex + s * (q - apex);
                           const double d = 1.0 - x.squaredNorm();
                           return s * s / (d * d);
                         },
                         0.0, 1.0);
                   },
                   a, b, c);
}

/// Volume of a Klein-model tetrahedron with at most one ideal vertex.
inline double klein_volume(const std::array<Eigen::Vector3d, 4>& v) {
  int ideal = -1, count = 0;
  for (int i = 0; i < 4; ++i) {
    if (std::abs(v[i].norm() - 1.0) <= kIdealTol) {
      ideal = i;
      ++count;
    }
  }
  if (count > 1) throw ArgumentError("klein_volume supports at most one ideal vertex");
  const int apex = count == 1 ? ideal : 0;
  std::array<Eigen::Vector3d, 3> base;
  int n = 0;
  for (int i = 0; i < 4; ++i) {
    if (i != apex) base[n++] = v[i];
  }
  return klein_cone_volume(v[apex], base[0], base[1], base[2]);
}

struct SubTetrahedron {
  std::array<Eigen::Vector3d, 4> vertices;  ///< {ideal vertex, edge foot, face foot, centre}
  int vertex = 0;
  int edge = 0;  ///< index into kTetraEdges
  int face = 0;  ///< index of the opposite vertex
  double volume = 0.0;
};

struct Tessellation {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  double center_residual = 0.0;  ///< largest distance from the centre to the four axes
  std::vector<SubTetrahedron> pieces;
  double total_volume = 0.0;
};

/// Splits a regular ideal tetrahedron (klein model) into the 24 pieces spanned by a
/// vertex, the foot on an edge through it, the foot on a face through that edge, and the
/// common point of the four vertex-to-face axes. Klein lines are geodesics, and at the
/// centre (the origin) perpendicular feet are Euclidean.
inline Tessellation barycentric_tessellation(const IdealTetrahedron& tet) {
  const auto& v = tet.klein();
  double lmin = 1e300, lmax = 0.0;
  for (const auto& [i, j] : kTetraEdges) {
    const double l = (v[i] - v[j]).norm();
    lmin = std::min(lmin, l);
    lmax = std::max(lmax, l);
  }
  if (lmax - lmin > 1e-9) throw ArgumentError("barycentric tessellation needs a regular tetrahedron");

  Tessellation out;
  // Least-squares common point of the four axes vertex -> opposite face centroid.
  Eigen::Matrix3d lhs = Eigen::Matrix3d::Zero();
  Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
  std::array<Eigen::Vector3d, 4> dirs;
  for (int i = 0; i < 4; ++i) {
    Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
    for (int k = 0; k < 4; ++k) {
      if (k != i) centroid += v[k] / 3.0;
    }
    dirs[i] = (centroid - v[i]).normalized();
    const Eigen::Matrix3d proj = Eigen::Matrix3d::Identity() - dirs[i] * dirs[i].transpose();
    lhs += proj;
    rhs += proj * v[i];
  }
  out.center = lhs.ldlt().solve(rhs);
  for (int i = 0; i < 4; ++i) {
    const Eigen::Vector3d d = out.center - v[i];
    out.center_residual = std::max(out.center_residual, (d - d.dot(dirs[i]) * dirs[i]).norm());
  }

  for (int f = 0; f < 4; ++f) {
    Eigen::Vector3d face_pt = Eigen::Vector3d::Zero();
    for (int k = 0; k < 4; ++k) {
      if (k != f) face_pt += v[k] / 3.0;
    }
    for (int e = 0; e < 6; ++e) {
      const auto [a, b] = kTetraEdges[static_cast<std::size_t>(e)];
      if (a == f || b == f) continue;
      const Eigen::Vector3d edge_pt = 0.5 * (v[a] + v[b]);
      for (int w : {a, b}) {
        SubTetrahedron piece;
        piece.vertices = {v[w], edge_pt, face_pt, out.center};
        piece.vertex = w;
        piece.edge = e;
        piece.face = f;
        piece.volume = klein_volume(piece.vertices);
        out.total_volume += piece.volume;
        out.pieces.push_back(piece);
      }
    }
  }
  return out;
}

inline std::string to_string(Model m) { return m == Model::klein ? "klein" : "halfspace"; }

inline nlohmann::json tetra_json(const IdealTetrahedron& tet) {
  nlohmann::json klein = nlohmann::json::array(), half = nlohmann::json::array();
  for (int i = 0; i < 4; ++i) {
    klein.push_back({tet.klein()[i].x(), tet.klein()[i].y(), tet.klein()[i].z()});
    half.push_back(ext_json(tet.halfspace()[i]));
  }
  return {{"model", to_string(tet.model())}, {"klein", klein}, {"halfspace", half}};
}

}  // namespace cuspmin
