#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "cuspmin/discrete_area.hpp"
#include "support/generators.hpp"

using namespace cuspmin;

namespace {

// Fourth-order central stencil; thin triangles make the second-order one too coarse.
double fd_area_derivative(const PsiProfile& psi, PeriodicMesh mesh, int v, int axis, double h) {
  const double x0 = mesh.vertices[v][axis];
  mesh.vertices[v][axis] = x0 + h;
  const double ap = mesh_area(psi, mesh);
  mesh.vertices[v][axis] = x0 - h;
  const double am = mesh_area(psi, mesh);
  mesh.vertices[v][axis] = x0 + 2 * h;
  const double ap2 = mesh_area(psi, mesh);
  mesh.vertices[v][axis] = x0 - 2 * h;
  const double am2 = mesh_area(psi, mesh);
  return (8 * (ap - am) - (ap2 - am2)) / (12 * h);
}

// Polyline oracle for an oblique segment under Psi(z) = z.
double polyline_length(const Eigen::Vector3d& p, const Eigen::Vector3d& q, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector3d a = p + (q - p) * (double(i) / n), b = p + (q - p) * (double(i + 1) / n);
    s += (b - a).norm() / (0.5 * (a.z() + b.z()));
  }
  return s;
}

}  // namespace

TEST(EdgeLength, Examples) {
  const auto id = PsiProfile::identity();
  const CuspEnd end;
  EXPECT_NEAR(edge_length(id, end, {0, 0, 1}, {0, 0, 2}), std::log(2.0), 1e-9);
  EXPECT_NEAR(edge_length(id, end, {0, 0, 3}, {0.7, 0, 3}), 0.7 / 3.0, 1e-15);
  EXPECT_NEAR(edge_length(id, end, {0.9, 0, 3}, {0, 0, 3}, {1, 0}), 0.1 / 3.0, 1e-15);
  EXPECT_THROW(edge_length(id, end, {0, 0, 0.3}, {0, 0, 1}), DomainError);
}

TEST(EdgeLength, ObliqueRefinementOrder) {
  const auto id = PsiProfile::identity();
  const Eigen::Vector3d p(0, 0, 1), q(0.8, 0.3, 2.5);
  const double exact = edge_length(id, CuspEnd(), p, q);
  const double e1 = std::abs(polyline_length(p, q, 20) - exact);
  const double e2 = std::abs(polyline_length(p, q, 40) - exact);
  EXPECT_NEAR(std::log2(e1 / e2), 2.0, 0.1);
}

TEST(MeshArea, FlatTori) {
  const auto id = PsiProfile::identity();
  EXPECT_NEAR(mesh_area(id, flat_torus(CuspEnd(), 1.0, 8, 8)), 1.0, 1e-10);
  EXPECT_NEAR(mesh_area(id, flat_torus(CuspEnd(), 2.0, 8, 8)), 0.25, 1e-6);
  const CuspEnd skew({0.7, 0.1}, {0.2, 0.9});
  EXPECT_NEAR(mesh_area(id, flat_torus(skew, 1.7, 5, 7)), torus_quantities(skew, id, 1.7).area, 1e-12);
}

TEST(MeshArea, VerticalStripConverges) {
  const auto id = PsiProfile::identity();
  const double l = 0.5;
  const double exact = l * 0.5;
  EXPECT_NEAR(mesh_area(id, vertical_strip(l, 1, 2, 8, 8)), exact, 0.02 * exact);
  double prev = 0.0;
  for (int n : {4, 8, 16, 32}) {
    const double err = std::abs(mesh_area(id, vertical_strip(l, 1, 2, 8, n)) - exact);
    if (prev > 0) {
      EXPECT_GE(std::log2(prev / err), 1.7) << "n=" << n;
    }
    prev = err;
  }
}

TEST(MeshArea, Additivity) {
  const auto psi = PsiProfile::ramp(1.0, 2.0, 1.5);
  auto mesh = vertical_strip(1.0, 1.0, 3.0, 6, 6);
  const double total = mesh_area(psi, mesh);
  const auto per = triangle_areas(psi, mesh);
  double s = 0;
  for (double a : per) s += a;
  EXPECT_NEAR(s, total, 1e-14);
}

TEST(AreaGradient, CriticalHorotorus) {
  const auto psi = PsiProfile::ramp(1.0, 4.0 / 3.0, 7.0 / 6.0);
  const auto g = area_gradient(psi, flat_torus(CuspEnd({0.4, 0}, {0, 0.4}), 4.0 / 3.0, 6, 6));
  for (const auto& v : g) EXPECT_NEAR(v.z(), 0.0, 1e-10);
}

TEST(AreaGradient, BoundaryIsZero) {
  const auto psi = PsiProfile::identity();
  auto mesh = vertical_strip(1.0, 1.0, 2.0, 5, 4);
  perturb_interior(mesh, 1, 0.05, 3);
  const auto g = area_gradient(psi, mesh);
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    if (mesh.boundary[v]) {
      EXPECT_EQ(g[v], Eigen::Vector3d::Zero());
    }
  }
}

TEST(AreaGradient, MatchesFiniteDifferences) {
  props::Gen gen(41);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto psi = trial % 2 ? gen.ramp() : PsiProfile::identity();
    const int n = gen.integer(4, 14), m = gen.integer(4, 14);
    auto mesh = gen.graph(n, m, 0.8, 2.4);
    // Horizontal jitter too, so all three components are exercised.
    for (auto& v : mesh.vertices) {
      v.x() += gen.uniform(-0.02, 0.02);
      v.y() += gen.uniform(-0.02, 0.02);
    }
    const auto g = area_gradient(psi, mesh);
    for (int s = 0; s < 3; ++s) {
      const int v = gen.integer(0, static_cast<int>(mesh.num_vertices()) - 1);
      for (int axis = 0; axis < 3; ++axis) {
        const double fd = fd_area_derivative(psi, mesh, v, axis, 1e-5);
        const double scale = std::max(g[v].norm(), 1e-3);
        EXPECT_LE(std::abs(fd - g[v][axis]) / scale, 1e-6) << "trial " << trial << " axis " << axis;
        ++checked;
      }
    }
  }
  EXPECT_EQ(checked, 1800);
}

TEST(DualAreas, SumToArea) {
  const auto psi = PsiProfile::identity();
  const auto mesh = hex_disk(CuspEnd(), {0.5, 0.5}, 0.3, 0.9, 4);
  double s = 0;
  for (double a : vertex_dual_areas(psi, mesh)) s += a;
  EXPECT_NEAR(s, mesh_area(psi, mesh), 1e-14);
}
