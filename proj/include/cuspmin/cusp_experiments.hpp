#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "cuspmin/cusp_geometry.hpp"
#include "cuspmin/discrete_area.hpp"
#include "cuspmin/errors.hpp"
#include "cuspmin/minimize.hpp"
#include "cuspmin/periodic_mesh.hpp"
#include "cuspmin/psi_profile.hpp"
#include "cuspmin/surface_analysis.hpp"

// Numerical experiments in a cusp end: graph descent toward a critical horotorus,
// spanning disks under a barrier torus, transversality of converged surfaces,
// second-variation probes of vertical planes, angle-defect Gauss-Bonnet and slab
// growth.

namespace cuspmin {

// ---------------------------------------------------------------------------
// Maximum principle I: periodic graphs

struct MaxPrincipleIRun {
  std::uint64_t seed = 0;
  int iterations = 0;
  double max_deviation = 0.0;  ///< max |u - z*| at the end
  double residual = 0.0;
  double psi_d1 = 0.0;         ///< Psi'(z*)
  bool converged = false;
  double initial_area = 0.0;
  double final_area = 0.0;
  double max_area_increase = 0.0;
};

/// First critical height of psi inside [lo, hi].
inline double critical_height_in(const PsiProfile& psi, double lo, double hi) {
  for (double z : psi.critical_points()) {
    if (z >= lo && z <= hi) return z;
  }
  throw ArgumentError("profile has no critical height in the graph's range");
}

/// Descends the graph of u in (C, g_Psi) with vertical mobility. The critical torus
/// T(z*) is a barrier: heights are kept in {z <= z*}, where the profile is strictly
/// increasing below z*.
inline MaxPrincipleIRun max_principle_I_experiment(const PsiProfile& psi, const CuspEnd& end,
                                                   const PeriodicGraphFn& graph, SolveConfig cfg) {
  const auto [lo, hi] = std::minmax_element(graph.heights.begin(), graph.heights.end());
  const double z_star = critical_height_in(psi, *lo, std::max(*hi, *lo) + 1.0);
  cfg.mobility = {0.0, 0.0, 1.0};
  cfg.z_ceiling = z_star;
  const SolveResult res = minimize(psi, graph_mesh(end, graph), cfg);
  MaxPrincipleIRun out;
  out.iterations = res.iterations;
  out.residual = res.residual;
  out.converged = res.converged;
  out.psi_d1 = psi.d1(z_star);
  out.initial_area = res.initial_area;
  out.final_area = res.final_area;
  out.max_area_increase = res.iterations > 0 ? res.max_area_increase : 0.0;
  for (const auto& v : res.mesh.vertices) out.max_deviation = std::max(out.max_deviation, std::abs(v.z() - z_star));
  return out;
}

/// u = z* + amplitude * U(-1, 1) on an n x n grid.
inline PeriodicGraphFn random_graph_around(double z_star, int n, double amplitude, std::uint64_t seed) {
  PeriodicGraphFn u(n, n, z_star);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (auto& h : u.heights) h = z_star + amplitude * unit(rng);
  return u;
}

/// Graph with a fixed boundary at height z_boundary under the hyperbolic metric, pushed
/// down in the interior and relaxed. Horotori are mean convex toward the cusp, so the
/// relaxed surface has no interior minimum below the boundary.
struct BoundaryGraphRun {
  double z_boundary = 0.0;
  double z_min = 0.0;
  double z_max = 0.0;
  double residual = 0.0;
  bool converged = false;
};

inline BoundaryGraphRun boundary_graph_experiment(const CuspEnd& end, double z_boundary, double radius, int rings,
                                                  double dip, std::uint64_t seed, SolveConfig cfg) {
  PeriodicMesh mesh = hex_disk(end, Eigen::Vector2d::Zero(), radius, z_boundary, rings);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t i = 0; i < mesh.num_vertices(); ++i) {
    if (!mesh.boundary[i]) mesh.vertices[i].z() -= dip * unit(rng);
  }
  cfg.mobility = {0.0, 0.0, 1.0};
  const SolveResult res = minimize(PsiProfile::identity(), mesh, cfg);
  BoundaryGraphRun out;
  out.z_boundary = z_boundary;
  out.residual = res.residual;
  out.converged = res.converged;
  out.z_min = std::numeric_limits<double>::infinity();
  out.z_max = -out.z_min;
  for (const auto& v : res.mesh.vertices) {
    out.z_min = std::min(out.z_min, v.z());
    out.z_max = std::max(out.z_max, v.z());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Maximum principle II: spanning disks

struct MaxPrincipleIIRun {
  std::uint64_t seed = 0;
  double t0 = 0.0;
  double z_max = 0.0;
  double bound = 1.0;
  bool within = false;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
  bool line_search_failed = false;
  SurfaceReport report;
  PeriodicMesh mesh;
};

/// Minimizes `disk` (boundary fixed in T(1 - t0)) under psi and reports its top height.
inline MaxPrincipleIIRun max_principle_II_experiment(const PsiProfile& psi, const CuspEnd& end, double t0,
                                                     const PeriodicMesh& disk, const SolveConfig& cfg,
                                                     double bound = 1.0, double tol = 0.01) {
  if (!(t0 > 0.0 && t0 < 0.5)) throw ArgumentError("t0 must lie in (0, 1/2)");
  if (end.lambda() > cfg.lambda0) throw ArgumentError("cusp end has Lambda above lambda0");
  bool any_boundary = false;
  for (std::size_t i = 0; i < disk.num_vertices(); ++i) {
    if (!disk.boundary[i]) continue;
    any_boundary = true;
    if (std::abs(disk.vertices[i].z() - (1.0 - t0)) > 1e-12) {
      throw ArgumentError("boundary must lie in the torus T(1 - t0)");
    }
  }
  if (!any_boundary) throw ArgumentError("spanning surface needs a boundary");
  const SolveResult res = minimize(psi, disk, cfg);
  MaxPrincipleIIRun out;
  out.t0 = t0;
  out.bound = bound;
  out.iterations = res.iterations;
  out.residual = res.residual;
  out.converged = res.converged;
  out.line_search_failed = res.line_search_failed;
  out.report = surface_report(psi, res.mesh);
  out.z_max = out.report.z_max;
  out.within = out.z_max <= bound + tol;
  out.mesh = res.mesh;
  return out;
}

/// Hex disk at height 1 - t0 with its interior lifted by a seeded random bump.
inline PeriodicMesh seeded_spanning_disk(const CuspEnd& end, double t0, double radius, int rings, double lift,
                                         std::uint64_t seed) {
  PeriodicMesh disk = hex_disk(end, Eigen::Vector2d::Zero(), radius, 1.0 - t0, rings);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t i = 0; i < disk.num_vertices(); ++i) {
    if (disk.boundary[i]) continue;
    const double r = disk.vertices[i].head<2>().norm() / radius;
    disk.vertices[i].z() += lift * (1.0 - r * r) * unit(rng);
  }
  return disk;
}

// ---------------------------------------------------------------------------
// Vertical planes: criticality, second variation, transversality

/// Compactly supported normal bump on the interior of a vertical strip in {y = y0}.
inline PeriodicMesh bump_normal(const PeriodicMesh& strip, double amplitude, std::uint64_t seed) {
  PeriodicMesh m = strip;
  double x_lo = 1e300, x_hi = -1e300, z_lo = 1e300, z_hi = -1e300;
  for (const auto& v : m.vertices) {
    x_lo = std::min(x_lo, v.x());
    x_hi = std::max(x_hi, v.x());
    z_lo = std::min(z_lo, v.z());
    z_hi = std::max(z_hi, v.z());
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double width = x_hi - x_lo, height = z_hi - z_lo;
  const double period = m.end.v1().norm();
  const double r = (0.15 + 0.25 * unit(rng)) * std::min(width, height);
  const double cx = x_lo + width * unit(rng);
  const double cz = z_lo + r + (height - 2.0 * r) * unit(rng);
  const double a = amplitude * (unit(rng) < 0.5 ? -1.0 : 1.0) * (0.5 + 0.5 * unit(rng));
  for (std::size_t i = 0; i < m.num_vertices(); ++i) {
    if (m.boundary[i]) continue;
    double dx = std::abs(m.vertices[i].x() - cx);
    dx = std::min(dx, period - dx);
    const double d2 = (dx * dx + std::pow(m.vertices[i].z() - cz, 2)) / (r * r);
    if (d2 < 1.0) m.vertices[i].y() += a * (1.0 - d2) * (1.0 - d2);
  }
  return m;
}

struct GeodesicPlaneCheck {
  double area = 0.0;
  double residual = 0.0;
  bool critical = false;
  std::vector<double> area_increase;  ///< per perturbation
  bool all_increase = false;
};

/// A vertical plane is totally geodesic: its normal residual vanishes and compact
/// normal perturbations increase area.
inline GeodesicPlaneCheck geodesic_plane_check(const PsiProfile& psi, const PeriodicMesh& strip, int perturbations,
                                               double amplitude, std::uint64_t seed, SolveConfig cfg) {
  cfg.mobility = {0.0, 1.0, 0.0};
  cfg.max_iter = 0;
  const SolveResult res = minimize(psi, strip, cfg);
  GeodesicPlaneCheck out;
  out.area = res.initial_area;
  out.residual = res.residual;
  out.critical = res.residual < cfg.grad_tol && res.iterations == 0;
  out.all_increase = true;
  for (int k = 0; k < perturbations; ++k) {
    const double d = mesh_area(psi, bump_normal(strip, amplitude, seed + static_cast<std::uint64_t>(k))) - out.area;
    out.area_increase.push_back(d);
    out.all_increase = out.all_increase && d > 0.0;
  }
  return out;
}

struct TransversalityRun {
  std::vector<IncidenceSummary> levels;
  double min_angle = 0.0;  ///< recorded theta_0 over all levels
  double residual = 0.0;
  bool converged = false;
  double initial_area = 0.0;
  double final_area = 0.0;
  double max_area_increase = 0.0;
  SurfaceReport report;
  PeriodicMesh mesh;
};

/// Perturbs a vertical plane along its normal, relaxes it, and measures the angle with
/// the level tori at the given heights.
inline TransversalityRun transversality_experiment(const PsiProfile& psi, const PeriodicMesh& strip,
                                                   double amplitude, std::uint64_t seed,
                                                   const std::vector<double>& levels, SolveConfig cfg) {
  PeriodicMesh m = strip;
  perturb_interior(m, 1, amplitude, seed);
  cfg.mobility = {0.0, 1.0, 0.0};
  const SolveResult res = minimize(psi, m, cfg);
  TransversalityRun out;
  out.residual = res.residual;
  out.converged = res.converged;
  out.initial_area = res.initial_area;
  out.final_area = res.final_area;
  out.max_area_increase = res.iterations > 0 ? res.max_area_increase : 0.0;
  out.report = surface_report(psi, res.mesh, levels);
  out.levels = out.report.incidence_angles;
  out.min_angle = std::numbers::pi / 2.0;
  for (const auto& l : out.levels) {
    if (!l.angles.empty()) out.min_angle = std::min(out.min_angle, l.min_angle);
  }
  out.mesh = res.mesh;
  return out;
}

// ---------------------------------------------------------------------------
// Gauss-Bonnet

struct ClosedGaussBonnet {
  std::string name;
  double total = 0.0;
  int chi = 0;
  double error = 0.0;  ///< |total - 2 pi chi|
};

/// Octahedron, icosahedron and a flat torus, the spheres placed well inside the chart.
inline std::vector<ClosedGaussBonnet> closed_gauss_bonnet(const PsiProfile& psi) {
  const std::vector<std::pair<std::string, PeriodicMesh>> fixtures{
      {"octahedron", octahedron({0.0, 0.0, 2.0}, 0.7)},
      {"icosahedron", icosahedron({0.3, -0.2, 3.0}, 1.1)},
      {"torus", flat_torus(CuspEnd({1.0, 0.0}, {0.3, 0.8}), 1.5, 6, 5)}};
  std::vector<ClosedGaussBonnet> out;
  for (const auto& [name, mesh] : fixtures) {
    const GaussBonnet gb = total_gauss_curvature(psi, mesh);
    out.push_back({name, gb.total, gb.chi, std::abs(gb.total - 2.0 * std::numbers::pi * gb.chi)});
  }
  return out;
}

struct SlabDefectLevel {
  int nx = 0;
  int nz = 0;
  double h = 0.0;            ///< largest coordinate edge
  double interior_defect = 0.0;
  double interior_area = 0.0;
  double rel_error = 0.0;    ///< |defect + area| / area
};

/// Interior angle defects of the vertical strip width x [z1, z2] (curvature -1 in the
/// hyperbolic metric) against its interior dual area, over successive refinements.
inline std::vector<SlabDefectLevel> slab_defect_refinement(double width, double z1, double z2,
                                                           const std::vector<std::pair<int, int>>& grids) {
  const PsiProfile psi = PsiProfile::identity();
  std::vector<SlabDefectLevel> out;
  for (const auto& [nx, nz] : grids) {
    const PeriodicMesh strip = vertical_strip(width, z1, z2, nx, nz);
    const GaussBonnet gb = total_gauss_curvature(psi, strip);
    SlabDefectLevel l;
    l.nx = nx;
    l.nz = nz;
    l.h = std::hypot(width / nx, (z2 - z1) / nz);
    l.interior_defect = gb.interior_defect;
    l.interior_area = gb.interior_dual_area;
    l.rel_error = std::abs(gb.interior_defect + gb.interior_dual_area) / gb.interior_dual_area;
    out.push_back(l);
  }
  return out;
}

/// Least-squares slope of log(error) against log(h).
inline double observed_order(const std::vector<double>& h, const std::vector<double>& err) {
  const std::size_t n = h.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::log(h[i]), y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// ---------------------------------------------------------------------------
// Slab growth

struct SlabProfileRun {
  std::vector<SlabArea> slabs;
  double width = 0.0;
  double plateau = 0.0;
  double limit = 0.0;            ///< width / plateau^2
  double far_slab_area = 0.0;    ///< last full slab
  double rel_error = 0.0;
  double c0 = 0.0;               ///< smallest full-slab area
  double total_area = 0.0;
  double slab_sum = 0.0;
};

/// Slab areas of the vertical plane of width `width` spanning [z1, z2]. Beyond the
/// plateau each unit slab has area width / plateau^2.
inline SlabProfileRun slab_profile_experiment(const PsiProfile& psi, double width, double z1, double z2, int nx,
                                              int nz) {
  const PeriodicMesh strip = vertical_strip(width, z1, z2, nx, nz);
  SlabProfileRun out;
  out.slabs = slab_area_profile(psi, strip);
  out.width = width;
  out.plateau = psi(z2);
  out.limit = width / (out.plateau * out.plateau);
  out.total_area = mesh_area(psi, strip);
  out.c0 = std::numeric_limits<double>::infinity();
  for (const auto& s : out.slabs) {
    out.slab_sum += s.area;
    if (s.k >= std::ceil(z1) && s.k + 1 <= z2) {
      out.c0 = std::min(out.c0, s.area);
      out.far_slab_area = s.area;
    }
  }
  out.rel_error = std::abs(out.far_slab_area - out.limit) / out.limit;
  return out;
}

}  // namespace cuspmin
