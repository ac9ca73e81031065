#pragma once

#include <array>
#include <cmath>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "cuspmin/errors.hpp"
#include "cuspmin/periodic_mesh.hpp"
#include "cuspmin/psi_profile.hpp"
#include "cuspmin/quadrature.hpp"

namespace cuspmin {

/// Conformal area weight 1 / Psi^2 and its z-derivative -2 Psi' / Psi^3.
inline double area_weight(const PsiProfile& psi, double z) {
  const double s = psi(z);
  return 1.0 / (s * s);
}
inline double area_weight_d(const PsiProfile& psi, double z) {
  const double s = psi(z);
  return -2.0 * psi.d1(z) / (s * s * s);
}

/// g_Psi length of the coordinate segment from p to q + shift(offset).
inline double edge_length(const PsiProfile& psi, const CuspEnd& end, const Eigen::Vector3d& p,
                          const Eigen::Vector3d& q, LatticeOffset offset = {},
                          double tol = quadrature::kDefaultTolerance) {
  const Eigen::Vector3d qh = q + end.shift(offset.i, offset.j);
  psi(p.z());
  psi(qh.z());
  const double len = (qh - p).norm();
  if (len == 0.0) return 0.0;
  const double z0 = p.z(), dz = qh.z() - p.z();
  if (dz == 0.0) return len / psi(z0);
  return len * quadrature::adaptive_simpson([&](double t) { return 1.0 / psi(z0 + t * dz); }, 0.0, 1.0, tol);
}

/// Riemannian area of one unrolled triangle: coordinate area times the edge-midpoint
/// average of the weight.
inline double triangle_area(const PsiProfile& psi, const std::array<Eigen::Vector3d, 3>& c) {
  const double a = coordinate_area(c);
  const double w = (area_weight(psi, 0.5 * (c[0].z() + c[1].z())) + area_weight(psi, 0.5 * (c[1].z() + c[2].z())) +
                    area_weight(psi, 0.5 * (c[2].z() + c[0].z()))) /
                   3.0;
  return a * w;
}

inline double mesh_area(const PsiProfile& psi, const PeriodicMesh& mesh) {
  double total = 0.0;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto c = mesh.corners(t);
    if (!(coordinate_area(c) > 0.0)) throw MeshError("degenerate triangle in mesh_area");
    total += triangle_area(psi, c);
  }
  return total;
}

/// Per-triangle Riemannian areas.
inline std::vector<double> triangle_areas(const PsiProfile& psi, const PeriodicMesh& mesh) {
  std::vector<double> out(mesh.num_triangles());
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) out[t] = triangle_area(psi, mesh.corners(t));
  return out;
}

/// Barycentric dual areas: one third of the Riemannian area of each incident triangle.
inline std::vector<double> vertex_dual_areas(const PsiProfile& psi, const PeriodicMesh& mesh) {
  std::vector<double> dual(mesh.num_vertices(), 0.0);
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const double a = triangle_area(psi, mesh.corners(t)) / 3.0;
    for (int k = 0; k < 3; ++k) dual[mesh.triangles[t][k]] += a;
  }
  return dual;
}

/// Exact gradient of mesh_area; boundary vertices get zero.
inline std::vector<Eigen::Vector3d> area_gradient(const PsiProfile& psi, const PeriodicMesh& mesh) {
  std::vector<Eigen::Vector3d> grad(mesh.num_vertices(), Eigen::Vector3d::Zero());
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto c = mesh.corners(t);
    const Eigen::Vector3d n = (c[1] - c[0]).cross(c[2] - c[0]);
    const double nn = n.norm();
    if (!(nn > 0.0)) throw MeshError("degenerate triangle in area_gradient");
    const Eigen::Vector3d nhat = n / nn;
    const double a = 0.5 * nn;
    std::array<double, 3> zm{}, w{}, wd{};
    for (int k = 0; k < 3; ++k) {
      zm[k] = 0.5 * (c[k].z() + c[(k + 1) % 3].z());  // midpoint of edge k -> k+1
      w[k] = area_weight(psi, zm[k]);
      wd[k] = area_weight_d(psi, zm[k]);
    }
    const double wbar = (w[0] + w[1] + w[2]) / 3.0;
    for (int k = 0; k < 3; ++k) {
      const int v = mesh.triangles[t][k];
      if (mesh.boundary[v]) continue;
      Eigen::Vector3d g = wbar * 0.5 * nhat.cross(c[(k + 2) % 3] - c[(k + 1) % 3]);
      g.z() += a * (wd[k] + wd[(k + 2) % 3]) / 6.0;
      grad[v] += g;
    }
  }
  return grad;
}

}  // namespace cuspmin
