#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <tuple>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "cuspmin/discrete_area.hpp"
#include "cuspmin/periodic_mesh.hpp"
#include "cuspmin/psi_profile.hpp"

namespace cuspmin {

// ---------------------------------------------------------------------------
// Incidence angles with a level torus

struct IncidenceSummary {
  double level = 0.0;
  std::vector<double> angles;  ///< radians in [0, pi/2], one per crossing triangle
  double min_angle = 0.0;
  double median_angle = 0.0;
  int perturbed_vertices = 0;
};

inline constexpr double kTransverseSnap = 1e-9;
inline constexpr double kTransverseLift = 1e-8;

/// Angle between each triangle crossing {z = c} and the horizontal. The metric is
/// conformal, so Euclidean and Riemannian angles agree.
inline IncidenceSummary incidence_angle(const PeriodicMesh& mesh, double c) {
  PeriodicMesh m = mesh;
  IncidenceSummary out;
  out.level = c;
  for (auto& v : m.vertices) {
    if (std::abs(v.z() - c) < kTransverseSnap) {
      v.z() = c + kTransverseLift;
      ++out.perturbed_vertices;
    }
  }
  for (std::size_t t = 0; t < m.num_triangles(); ++t) {
    const auto p = m.corners(t);
    const double lo = std::min({p[0].z(), p[1].z(), p[2].z()});
    const double hi = std::max({p[0].z(), p[1].z(), p[2].z()});
    if (!(lo < c && c < hi)) continue;
    const Eigen::Vector3d n = (p[1] - p[0]).cross(p[2] - p[0]).normalized();
    out.angles.push_back(std::acos(std::min(1.0, std::abs(n.z()))));
  }
  if (!out.angles.empty()) {
    std::vector<double> s = out.angles;
    std::sort(s.begin(), s.end());
    out.min_angle = s.front();
    const std::size_t h = s.size() / 2;
    out.median_angle = s.size() % 2 ? s[h] : 0.5 * (s[h - 1] + s[h]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Slab areas

namespace detail {

using Polygon = std::vector<Eigen::Vector3d>;

// Keeps the part of `poly` with sign * (z - level) >= 0.
inline Polygon clip_halfspace(const Polygon& poly, double level, double sign) {
  Polygon out;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector3d& a = poly[i];
    const Eigen::Vector3d& b = poly[(i + 1) % n];
    const double da = sign * (a.z() - level), db = sign * (b.z() - level);
    if (da >= 0) out.push_back(a);
    if ((da >= 0) != (db >= 0)) {
      const double t = da / (da - db);
      out.push_back(a + t * (b - a));
    }
  }
  return out;
}

// Degree-5 seven-point rule on a triangle for a weight depending on z only.
inline double triangle_weight_integral(const PsiProfile& psi, const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                                       const Eigen::Vector3d& c) {
  static constexpr double w0 = 0.225, w1 = 0.132394152788506, w2 = 0.125939180544827;
  static constexpr double a1 = 0.059715871789770, b1 = 0.470142064105115;
  static constexpr double a2 = 0.797426985353087, b2 = 0.101286507323456;
  const double area = 0.5 * (b - a).cross(c - a).norm();
  if (area == 0.0) return 0.0;
  auto f = [&](double l0, double l1, double l2) { return area_weight(psi, l0 * a.z() + l1 * b.z() + l2 * c.z()); };
  const double s = w0 * f(1.0 / 3, 1.0 / 3, 1.0 / 3) + w1 * (f(a1, b1, b1) + f(b1, a1, b1) + f(b1, b1, a1)) +
                   w2 * (f(a2, b2, b2) + f(b2, a2, b2) + f(b2, b2, a2));
  return area * s;
}

inline double polygon_weight_integral(const PsiProfile& psi, const Polygon& poly) {
  double s = 0.0;
  for (std::size_t i = 1; i + 1 < poly.size(); ++i) s += triangle_weight_integral(psi, poly[0], poly[i], poly[i + 1]);
  return s;
}

inline int slab_index(double z) { return static_cast<int>(std::floor(z)); }

}  // namespace detail

struct SlabArea {
  int k = 0;  ///< slab {k <= z <= k+1}, intersected with the chart
  double area = 0.0;
};

/// Per-slab Riemannian areas. Each triangle's mesh_area contribution is split across
/// slabs in proportion to exact clipped-polygon integrals, so the slabs sum to
/// mesh_area up to rounding.
inline std::vector<SlabArea> slab_area_profile(const PsiProfile& psi, const PeriodicMesh& mesh) {
  std::map<int, double> acc;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto c = mesh.corners(t);
    const double total = triangle_area(psi, c);
    const double lo = std::min({c[0].z(), c[1].z(), c[2].z()});
    const double hi = std::max({c[0].z(), c[1].z(), c[2].z()});
    const int k0 = detail::slab_index(lo), k1 = detail::slab_index(hi);
    if (k0 == k1 || (k1 == k0 + 1 && hi == static_cast<double>(k1))) {
      acc[k0] += total;
      continue;
    }
    const detail::Polygon tri{c[0], c[1], c[2]};
    std::vector<std::pair<int, double>> parts;
    double fine = 0.0;
    for (int k = k0; k <= k1; ++k) {
      auto poly = detail::clip_halfspace(tri, static_cast<double>(k), 1.0);
      poly = detail::clip_halfspace(poly, static_cast<double>(k + 1), -1.0);
      if (poly.size() < 3) continue;
      const double s = detail::polygon_weight_integral(psi, poly);
      parts.emplace_back(k, s);
      fine += s;
    }
    for (const auto& [k, s] : parts) acc[k] += total * (s / fine);
  }
  std::vector<SlabArea> out;
  if (acc.empty()) return out;
  for (int k = acc.begin()->first; k <= acc.rbegin()->first; ++k) {
    const auto it = acc.find(k);
    out.push_back({k, it == acc.end() ? 0.0 : it->second});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Angle-defect Gauss-Bonnet

struct GaussBonnet {
  double total = 0.0;              ///< all defects, interior plus boundary
  double interior_defect = 0.0;    ///< sum of 2 pi - angles over interior vertices
  double boundary_defect = 0.0;    ///< sum of pi - angles over boundary vertices
  double interior_dual_area = 0.0; ///< Riemannian barycentric area of interior vertices
  int chi = 0;
  bool closed = false;
  std::vector<std::size_t> triangle_inequality_violations;
};

/// Vertices on an edge used by exactly one triangle.
inline std::vector<bool> topological_boundary(const PeriodicMesh& mesh) {
  std::vector<bool> b(mesh.num_vertices(), false);
  for (const auto& [key, n] : edge_incidence(mesh)) {
    if (n == 1) b[key.a] = b[key.b] = true;
  }
  return b;
}

inline GaussBonnet total_gauss_curvature(const PsiProfile& psi, const PeriodicMesh& mesh) {
  GaussBonnet out;
  const auto on_boundary = topological_boundary(mesh);
  out.closed = std::none_of(on_boundary.begin(), on_boundary.end(), [](bool b) { return b; });
  std::vector<double> angle_sum(mesh.num_vertices(), 0.0);
  std::map<EdgeKey, double> lengths;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    const auto c = mesh.corners(t);
    std::array<double, 3> len{};  // len[k] is the edge opposite corner k
    for (int k = 0; k < 3; ++k) {
      const int a = (k + 1) % 3, b = (k + 2) % 3;
      const EdgeKey key = make_edge_key(tri[a], tri[b], mesh.offsets[t][a]);
      auto it = lengths.find(key);
      if (it == lengths.end()) it = lengths.emplace(key, edge_length(psi, mesh.end, c[a], c[b])).first;
      len[k] = it->second;
    }
    for (int k = 0; k < 3; ++k) {
      const double opp = len[k], l1 = len[(k + 1) % 3], l2 = len[(k + 2) % 3];
      if (!(opp < l1 + l2)) {
        out.triangle_inequality_violations.push_back(t);
        continue;
      }
      const double cosv = (l1 * l1 + l2 * l2 - opp * opp) / (2.0 * l1 * l2);
      angle_sum[tri[k]] += std::acos(std::clamp(cosv, -1.0, 1.0));
    }
  }
  const auto dual = vertex_dual_areas(psi, mesh);
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    if (on_boundary[v]) {
      out.boundary_defect += std::numbers::pi - angle_sum[v];
    } else {
      out.interior_defect += 2.0 * std::numbers::pi - angle_sum[v];
      out.interior_dual_area += dual[v];
    }
  }
  out.total = out.interior_defect + out.boundary_defect;
  out.chi = euler_characteristic(mesh);
  return out;
}

/// True when every edge is traversed once in each direction by its two triangles.
inline bool consistently_oriented(const PeriodicMesh& mesh) {
  std::map<std::tuple<int, int, int, int>, int> directed;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    for (int k = 0; k < 3; ++k) {
      const auto& o = mesh.offsets[t][k];
      if (++directed[{tri[k], tri[(k + 1) % 3], o.i, o.j}] > 1) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Report

struct SurfaceReport {
  double area = 0.0;
  double max_abs_mean_curvature = 0.0;
  double total_gauss_curvature = 0.0;
  double interior_gauss_curvature = 0.0;
  double interior_area = 0.0;
  int euler_characteristic = 0;
  bool closed = false;
  std::optional<int> genus;
  double z_min = 0.0;
  double z_max = 0.0;
  std::vector<IncidenceSummary> incidence_angles;
  std::vector<SlabArea> slab_areas;
  bool stability_bounds_ok = false;
};

/// Discrete |H| at interior vertices: |grad A| Psi / (2 dual area).
inline double max_abs_mean_curvature(const PsiProfile& psi, const PeriodicMesh& mesh) {
  const auto g = area_gradient(psi, mesh);
  const auto dual = vertex_dual_areas(psi, mesh);
  double h = 0.0;
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    if (mesh.boundary[v]) continue;
    h = std::max(h, g[v].norm() * psi(mesh.vertices[v].z()) / (2.0 * dual[v]));
  }
  return h;
}

inline SurfaceReport surface_report(const PsiProfile& psi, const PeriodicMesh& mesh,
                                    const std::vector<double>& levels = {}) {
  SurfaceReport r;
  r.area = mesh_area(psi, mesh);
  r.max_abs_mean_curvature = max_abs_mean_curvature(psi, mesh);
  const GaussBonnet gb = total_gauss_curvature(psi, mesh);
  r.total_gauss_curvature = gb.total;
  r.interior_gauss_curvature = gb.interior_defect;
  r.interior_area = gb.interior_dual_area;
  r.euler_characteristic = gb.chi;
  r.closed = gb.closed;
  if (gb.closed && consistently_oriented(mesh)) r.genus = (2 - gb.chi) / 2;
  r.z_min = std::numeric_limits<double>::infinity();
  r.z_max = -std::numeric_limits<double>::infinity();
  for (const auto& v : mesh.vertices) {
    r.z_min = std::min(r.z_min, v.z());
    r.z_max = std::max(r.z_max, v.z());
  }
  for (double c : levels) r.incidence_angles.push_back(incidence_angle(mesh, c));
  r.slab_areas = slab_area_profile(psi, mesh);
  return r;
}

struct StabilityCheck {
  int genus = 0;
  double lower = 0.0;  ///< 2 pi (g - 1)
  double upper = 0.0;  ///< 4 pi (g - 1)
  bool vacuous = false;
  std::optional<bool> area_in_window;  ///< closed surfaces only
  bool curvature_ok = false;           ///< integral of K <= -area, within the tolerance
  bool ok = false;
};

/// Area window 2 pi (g-1) <= A <= 4 pi (g-1) for closed genus-g surfaces, and the
/// aggregate Gauss-relation bound K <= -1 (interior part for open surfaces).
inline StabilityCheck stability_bound_check(const SurfaceReport& report, int g, double rel_tol = 0.02) {
  StabilityCheck c;
  c.genus = g;
  c.lower = 2.0 * std::numbers::pi * (g - 1);
  c.upper = 4.0 * std::numbers::pi * (g - 1);
  c.vacuous = g <= 1;
  if (report.closed) {
    c.curvature_ok = report.total_gauss_curvature <= -report.area * (1.0 - rel_tol);
    c.area_in_window =
        !c.vacuous && report.area >= c.lower * (1.0 - rel_tol) && report.area <= c.upper * (1.0 + rel_tol);
    c.ok = !c.vacuous && c.curvature_ok && *c.area_in_window;
  } else {
    c.curvature_ok = report.interior_gauss_curvature <= -report.interior_area * (1.0 - rel_tol);
    c.ok = c.curvature_ok;
  }
  return c;
}

}  // namespace cuspmin
