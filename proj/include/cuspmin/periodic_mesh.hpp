#pragma once

#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <tuple>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <nlohmann/json.hpp>

#include "cuspmin/cusp_geometry.hpp"
#include "cuspmin/errors.hpp"

namespace cuspmin {

/// Integer combination i*v1 + j*v2 of the lattice generators.
struct LatticeOffset {
  int i = 0;
  int j = 0;

  LatticeOffset operator+(const LatticeOffset& o) const { return {i + o.i, j + o.j}; }
  LatticeOffset operator-(const LatticeOffset& o) const { return {i - o.i, j - o.j}; }
  LatticeOffset operator-() const { return {-i, -j}; }
  bool is_zero() const { return i == 0 && j == 0; }
  auto operator<=>(const LatticeOffset&) const = default;
};

/// Triangulated surface in the cusp chart, periodic under G(v1, v2).
///
/// offsets[t][k] annotates the edge tri[k] -> tri[k+1]: the copy of tri[k+1] adjacent to
/// tri[k] sits at vertices[tri[k+1]] + shift(offsets[t][k]) relative to the copy of
/// tri[k] at hand. Around each triangle the three offsets sum to zero.
struct PeriodicMesh {
  std::vector<Eigen::Vector3d> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<std::array<LatticeOffset, 3>> offsets;
  std::vector<bool> boundary;
  CuspEnd end;

  std::size_t num_vertices() const { return vertices.size(); }
  std::size_t num_triangles() const { return triangles.size(); }

  Eigen::Vector3d shift(const LatticeOffset& o) const { return end.shift(o.i, o.j); }

  /// Unrolled corner positions of triangle t, anchored at its first vertex.
  std::array<Eigen::Vector3d, 3> corners(std::size_t t) const {
    const auto& tri = triangles[t];
    const auto& off = offsets[t];
    return {vertices[tri[0]], vertices[tri[1]] + shift(off[0]),
            vertices[tri[2]] + shift(off[0] + off[1])};
  }
};

/// Undirected edge identity: endpoints in increasing order and the offset of the
/// second endpoint relative to the first.
struct EdgeKey {
  int a = 0;
  int b = 0;
  LatticeOffset offset;
  auto operator<=>(const EdgeKey&) const = default;
};

inline EdgeKey make_edge_key(int a, int b, LatticeOffset o) {
  if (a > b || (a == b && o < LatticeOffset{})) return {b, a, -o};
  return {a, b, o};
}

/// Edge -> number of incident triangles.
inline std::map<EdgeKey, int> edge_incidence(const PeriodicMesh& mesh) {
  std::map<EdgeKey, int> count;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    for (int k = 0; k < 3; ++k) {
      ++count[make_edge_key(tri[k], tri[(k + 1) % 3], mesh.offsets[t][k])];
    }
  }
  return count;
}

inline int euler_characteristic(const PeriodicMesh& mesh) {
  return static_cast<int>(mesh.num_vertices()) - static_cast<int>(edge_incidence(mesh).size()) +
         static_cast<int>(mesh.num_triangles());
}

inline double coordinate_area(const std::array<Eigen::Vector3d, 3>& c) {
  return 0.5 * (c[1] - c[0]).cross(c[2] - c[0]).norm();
}

/// Throws MeshError on bad indices, open offset cycles, heights below the chart,
/// degenerate triangles or edges shared by more than two triangles.
inline void validate(const PeriodicMesh& mesh, double min_area = 1e-14) {
  const int nv = static_cast<int>(mesh.num_vertices());
  if (mesh.offsets.size() != mesh.num_triangles()) throw MeshError("offsets must have one triple per triangle");
  if (mesh.boundary.size() != mesh.num_vertices()) throw MeshError("boundary flags must have one entry per vertex");
  for (const auto& v : mesh.vertices) {
    if (!(v.z() >= kChartFloor)) throw MeshError("mesh vertex below the cusp chart");
  }
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    for (int k = 0; k < 3; ++k) {
      if (tri[k] < 0 || tri[k] >= nv) throw MeshError("triangle references a missing vertex");
    }
    const auto& o = mesh.offsets[t];
    if (!(o[0] + o[1] + o[2]).is_zero()) {
      std::ostringstream msg;
      msg << "lattice offsets of triangle " << t << " do not close up";
      throw MeshError(msg.str());
    }
    if (!(coordinate_area(mesh.corners(t)) > min_area)) {
      std::ostringstream msg;
      msg << "triangle " << t << " is degenerate";
      throw MeshError(msg.str());
    }
  }
  for (const auto& [key, n] : edge_incidence(mesh)) {
    if (n > 2) throw MeshError("non-manifold edge shared by more than two triangles");
  }
}

/// Moves vertex i by the lattice vector k and rewrites the offsets so the surface in
/// the quotient is unchanged.
inline void rewrap_vertex(PeriodicMesh& mesh, int i, LatticeOffset k) {
  mesh.vertices[i] += mesh.shift(k);
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    for (int e = 0; e < 3; ++e) {
      if (tri[(e + 1) % 3] == i) mesh.offsets[t][e] = mesh.offsets[t][e] - k;
      if (tri[e] == i) mesh.offsets[t][e] = mesh.offsets[t][e] + k;
    }
  }
}

// ---------------------------------------------------------------------------
// Generators

/// Heights of a periodic graph over an n x m grid on the fundamental parallelogram.
struct PeriodicGraphFn {
  int n = 4;
  int m = 4;
  std::vector<double> heights;  // row-major, index j * n + i

  PeriodicGraphFn(int n_, int m_, double z) : n(n_), m(m_), heights(static_cast<std::size_t>(n_ * m_), z) {
    if (n < 4 || m < 4) throw ArgumentError("periodic graph needs at least a 4x4 grid");
    if (!(z >= kChartFloor)) throw DomainError("graph height below the cusp chart");
  }

  double& at(int i, int j) { return heights[static_cast<std::size_t>(j * n + i)]; }
  double at(int i, int j) const { return heights[static_cast<std::size_t>(j * n + i)]; }
};

/// Graph of u over the torus: vertex (i, j) sits at (i/n) v1 + (j/m) v2 + u(i, j) e_z.
inline PeriodicMesh graph_mesh(const CuspEnd& end, const PeriodicGraphFn& u) {
  PeriodicMesh mesh;
  mesh.end = end;
  const int n = u.n, m = u.m;
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < n; ++i) {
      const Eigen::Vector2d p = (static_cast<double>(i) / n) * end.v1() + (static_cast<double>(j) / m) * end.v2();
      mesh.vertices.emplace_back(p.x(), p.y(), u.at(i, j));
    }
  }
  mesh.boundary.assign(mesh.vertices.size(), false);
  auto id = [&](int i, int j) { return (j % m) * n + (i % n); };
  // Offset of grid node (i, j) with i in [0, n], j in [0, m] relative to its stored copy.
  auto wrap = [&](int i, int j) { return LatticeOffset{i / n, j / m}; };
  auto add = [&](std::array<std::pair<int, int>, 3> c) {
    std::array<int, 3> tri{};
    std::array<LatticeOffset, 3> pos{};
    for (int k = 0; k < 3; ++k) {
      tri[k] = id(c[k].first, c[k].second);
      pos[k] = wrap(c[k].first, c[k].second);
    }
    mesh.triangles.push_back(tri);
    mesh.offsets.push_back({pos[1] - pos[0], pos[2] - pos[1], pos[0] - pos[2]});
  };
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < n; ++i) {
      add({{{i, j}, {i + 1, j}, {i + 1, j + 1}}});
      add({{{i, j}, {i + 1, j + 1}, {i, j + 1}}});
    }
  }
  return mesh;
}

/// Horizontal torus {z = z0} on an n x m grid.
inline PeriodicMesh flat_torus(const CuspEnd& end, double z0, int n, int m) {
  return graph_mesh(end, PeriodicGraphFn(n, m, z0));
}

/// Vertical plane {y = y0} over one period of v1 = (width, 0), spanning [z1, z2] with
/// nz rows. Periodic in x; the top and bottom rows are the boundary.
inline PeriodicMesh vertical_strip(double width, double z1, double z2, int nx, int nz, double y0 = 0.0,
                                   double period_y = 1.0) {
  if (nx < 3 || nz < 1) throw ArgumentError("vertical strip needs nx >= 3 and nz >= 1");
  if (!(z1 >= kChartFloor) || !(z2 > z1)) throw ArgumentError("vertical strip needs 1/2 <= z1 < z2");
  PeriodicMesh mesh;
  mesh.end = CuspEnd({width, 0.0}, {0.0, period_y});
  for (int r = 0; r <= nz; ++r) {
    const double z = z1 + (z2 - z1) * r / nz;
    for (int i = 0; i < nx; ++i) {
      mesh.vertices.emplace_back(width * i / nx, y0, z);
      mesh.boundary.push_back(r == 0 || r == nz);
    }
  }
  auto id = [&](int i, int r) { return r * nx + (i % nx); };
  auto add = [&](std::array<std::pair<int, int>, 3> c) {
    std::array<int, 3> tri{};
    std::array<LatticeOffset, 3> pos{};
    for (int k = 0; k < 3; ++k) {
      tri[k] = id(c[k].first, c[k].second);
      pos[k] = {c[k].first / nx, 0};
    }
    mesh.triangles.push_back(tri);
    mesh.offsets.push_back({pos[1] - pos[0], pos[2] - pos[1], pos[0] - pos[2]});
  };
  for (int r = 0; r < nz; ++r) {
    for (int i = 0; i < nx; ++i) {
      // Alternate the diagonal so the mesh has no preferred slant.
      if ((i + r) % 2 == 0) {
        add({{{i, r}, {i + 1, r}, {i + 1, r + 1}}});
        add({{{i, r}, {i + 1, r + 1}, {i, r + 1}}});
      } else {
        add({{{i, r}, {i + 1, r}, {i, r + 1}}});
        add({{{i + 1, r}, {i + 1, r + 1}, {i, r + 1}}});
      }
    }
  }
  return mesh;
}

/// Flat disk of concentric hexagonal rings (ring k has 6k vertices) at height z,
/// centred at `center`. The outer ring is the boundary.
inline PeriodicMesh hex_disk(const CuspEnd& end, Eigen::Vector2d center, double radius, double z, int rings) {
  if (rings < 1) throw ArgumentError("hex disk needs at least one ring");
  PeriodicMesh mesh;
  mesh.end = end;
  std::vector<int> ring_start{0};
  mesh.vertices.emplace_back(center.x(), center.y(), z);
  mesh.boundary.push_back(false);
  for (int k = 1; k <= rings; ++k) {
    ring_start.push_back(static_cast<int>(mesh.vertices.size()));
    const double r = radius * k / rings;
    for (int s = 0; s < 6 * k; ++s) {
      // Points on the hexagon's sides, pushed out onto the circle.
      const int side = s / k, along = s % k;
      const double a0 = side * std::numbers::pi / 3.0, a1 = (side + 1) * std::numbers::pi / 3.0;
      const Eigen::Vector2d p0(std::cos(a0), std::sin(a0)), p1(std::cos(a1), std::sin(a1));
      Eigen::Vector2d p = p0 + (p1 - p0) * (static_cast<double>(along) / k);
      p = center + r * p.normalized();
      mesh.vertices.emplace_back(p.x(), p.y(), z);
      mesh.boundary.push_back(k == rings);
    }
  }
  auto ring_id = [&](int k, int s) { return k == 0 ? 0 : ring_start[k] + ((s % (6 * k)) + 6 * k) % (6 * k); };
  auto add = [&](int a, int b, int c) {
    mesh.triangles.push_back({a, b, c});
    mesh.offsets.push_back({});
  };
  for (int k = 1; k <= rings; ++k) {
    for (int side = 0; side < 6; ++side) {
      for (int along = 0; along < k; ++along) {
        const int s = side * k + along;           // outer index on ring k
        const int si = side * (k - 1) + along;    // inner index on ring k - 1
        add(ring_id(k - 1, si), ring_id(k, s), ring_id(k, s + 1));
        if (along < k - 1) add(ring_id(k - 1, si), ring_id(k, s + 1), ring_id(k - 1, si + 1));
      }
    }
  }
  return mesh;
}

/// Closed octahedron of circumradius r around c (a sphere-type fixture, chi = 2).
inline PeriodicMesh octahedron(Eigen::Vector3d c, double r) {
  PeriodicMesh mesh;
  const std::array<Eigen::Vector3d, 6> dirs{Eigen::Vector3d::UnitX(), -Eigen::Vector3d::UnitX(),
                                            Eigen::Vector3d::UnitY(), -Eigen::Vector3d::UnitY(),
                                            Eigen::Vector3d::UnitZ(), -Eigen::Vector3d::UnitZ()};
  for (const auto& d : dirs) mesh.vertices.push_back(c + r * d);
  mesh.boundary.assign(6, false);
  const std::array<std::array<int, 3>, 8> tris{{{0, 2, 4}, {2, 1, 4}, {1, 3, 4}, {3, 0, 4},
                                                {2, 0, 5}, {1, 2, 5}, {3, 1, 5}, {0, 3, 5}}};
  for (const auto& t : tris) {
    mesh.triangles.push_back(t);
    mesh.offsets.push_back({});
  }
  return mesh;
}

/// Closed icosahedron of circumradius r around c.
inline PeriodicMesh icosahedron(Eigen::Vector3d c, double r) {
  PeriodicMesh mesh;
  const double phi = 0.5 * (1.0 + std::sqrt(5.0));
  const std::array<Eigen::Vector3d, 12> p{
      Eigen::Vector3d(-1, phi, 0), Eigen::Vector3d(1, phi, 0),  Eigen::Vector3d(-1, -phi, 0),
      Eigen::Vector3d(1, -phi, 0), Eigen::Vector3d(0, -1, phi), Eigen::Vector3d(0, 1, phi),
      Eigen::Vector3d(0, -1, -phi), Eigen::Vector3d(0, 1, -phi), Eigen::Vector3d(phi, 0, -1),
      Eigen::Vector3d(phi, 0, 1),  Eigen::Vector3d(-phi, 0, -1), Eigen::Vector3d(-phi, 0, 1)};
  for (const auto& q : p) mesh.vertices.push_back(c + r * q.normalized());
  mesh.boundary.assign(12, false);
  const std::array<std::array<int, 3>, 20> tris{{{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                                                 {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                                                 {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                                                 {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}}};
  for (const auto& t : tris) {
    mesh.triangles.push_back(t);
    mesh.offsets.push_back({});
  }
  return mesh;
}

/// Adds amplitude * U(-1, 1) along `axis` to every interior vertex.
inline void perturb_interior(PeriodicMesh& mesh, int axis, double amplitude, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (std::size_t i = 0; i < mesh.num_vertices(); ++i) {
    if (mesh.boundary[i]) continue;
    mesh.vertices[i][axis] += amplitude * unit(rng);
  }
}

// ---------------------------------------------------------------------------
// JSON exchange

inline nlohmann::json mesh_to_json(const PeriodicMesh& mesh) {
  nlohmann::json j;
  j["vertices"] = nlohmann::json::array();
  for (const auto& v : mesh.vertices) j["vertices"].push_back({v.x(), v.y(), v.z()});
  j["triangles"] = nlohmann::json::array();
  j["offsets"] = nlohmann::json::array();
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    j["triangles"].push_back({tri[0], tri[1], tri[2]});
    nlohmann::json o = nlohmann::json::array();
    for (const auto& e : mesh.offsets[t]) o.push_back({e.i, e.j});
    j["offsets"].push_back(o);
  }
  j["boundary"] = nlohmann::json::array();
  for (std::size_t i = 0; i < mesh.num_vertices(); ++i) {
    if (mesh.boundary[i]) j["boundary"].push_back(i);
  }
  nlohmann::json lattice;
  to_json(lattice, mesh.end);
  j["lattice"] = lattice;
  return j;
}

inline PeriodicMesh mesh_from_json(const nlohmann::json& j) {
  PeriodicMesh mesh;
  for (const auto& v : j.at("vertices")) {
    if (v.size() != 3) throw MeshError("vertices must be [x, y, z] triples");
    mesh.vertices.emplace_back(v[0].get<double>(), v[1].get<double>(), v[2].get<double>());
  }
  for (const auto& t : j.at("triangles")) {
    if (t.size() != 3) throw MeshError("triangles must be index triples");
    mesh.triangles.push_back({t[0].get<int>(), t[1].get<int>(), t[2].get<int>()});
  }
  if (j.contains("offsets")) {
    for (const auto& o : j.at("offsets")) {
      if (o.size() != 3) throw MeshError("offsets must list three [i, j] pairs per triangle");
      std::array<LatticeOffset, 3> tri{};
      for (int k = 0; k < 3; ++k) tri[k] = {o[k].at(0).get<int>(), o[k].at(1).get<int>()};
      mesh.offsets.push_back(tri);
    }
  } else {
    mesh.offsets.assign(mesh.triangles.size(), {});
  }
  mesh.boundary.assign(mesh.vertices.size(), false);
  for (const auto& b : j.value("boundary", nlohmann::json::array())) {
    const int i = b.get<int>();
    if (i < 0 || i >= static_cast<int>(mesh.vertices.size())) throw MeshError("boundary index out of range");
    mesh.boundary[static_cast<std::size_t>(i)] = true;
  }
  mesh.end = j.contains("lattice") ? cusp_end_from_json(j.at("lattice")) : CuspEnd();
  validate(mesh);
  return mesh;
}

}  // namespace cuspmin
