#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "cuspmin/errors.hpp"
#include "cuspmin/ideal_tetrahedron.hpp"
#include "cuspmin/mobius.hpp"

namespace cuspmin {

namespace detail {

/// Union-find with a Z/2 label: parity(x) relates x to its root.
class ParityDsu {
 public:
  explicit ParityDsu(int n) : parent_(static_cast<std::size_t>(n)), parity_(static_cast<std::size_t>(n), 0) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  std::pair<int, int> find(int x) {
    int p = 0;
    int r = x;
    while (parent_[r] != r) {
      p ^= parity_[r];
      r = parent_[r];
    }
    // Path compression keeping parities relative to the root.
    int cur = x, acc = p;
    while (parent_[cur] != cur) {
      const int next = parent_[cur], step = parity_[cur];
      parent_[cur] = r;
      parity_[cur] = acc;
      acc ^= step;
      cur = next;
    }
    return {r, p};
  }

  /// Records parity(x) xor parity(y) == rel; returns false on contradiction.
  bool unite(int x, int y, int rel = 0) {
    const auto [rx, px] = find(x);
    const auto [ry, py] = find(y);
    if (rx == ry) return (px ^ py) == rel;
    parent_[rx] = ry;
    parity_[rx] = px ^ py ^ rel;
    return true;
  }

  int classes() {
    std::set<int> roots;
    for (int i = 0; i < static_cast<int>(parent_.size()); ++i) roots.insert(find(i).first);
    return static_cast<int>(roots.size());
  }

 private:
  std::vector<int> parent_;
  std::vector<int> parity_;
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Face pairings

/// Side pairing z -> mobius(z), or z -> mobius(conj z) when orientation reversing.
/// Vertex source[k] goes to target[k].
struct FacePairing {
  std::string name;
  std::array<int, 3> source{};
  std::array<int, 3> target{};
  MobiusMap mobius;
  bool reverses_orientation = false;

  ExtComplex apply(const ExtComplex& z) const {
    if (!reverses_orientation || z.is_infinite()) return mobius.apply(z);
    return mobius.apply(std::conj(z.value()));
  }

  /// The vertex map extended by sending the opposite vertex to the opposite vertex.
  std::array<int, 4> vertex_map() const {
    std::array<int, 4> m{};
    int s_opp = 6, t_opp = 6;
    for (int k = 0; k < 3; ++k) {
      m[source[k]] = target[k];
      s_opp -= source[k];
      t_opp -= target[k];
    }
    m[s_opp] = t_opp;
    return m;
  }
};

inline MobiusMap conj(const MobiusMap& m) {
  return {std::conj(m.a()), std::conj(m.b()), std::conj(m.c()), std::conj(m.d())};
}

/// Mobius part N of the reflection z -> N(conj z) in the plane over the circle through
/// three boundary points: N = M^-1 conj(M), M sending the points to (0, 1, inf).
inline MobiusMap reflection_mobius(const ExtComplex& p, const ExtComplex& q, const ExtComplex& r) {
  const MobiusMap m = MobiusMap::to_standard(p, q, r);
  return m.inverse() * conj(m);
}

inline int permutation_sign(const std::array<int, 4>& p) {
  int inversions = 0;
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) inversions += p[i] > p[j];
  }
  return inversions % 2 ? -1 : 1;
}

struct EdgeClass {
  std::vector<int> edges;  ///< indices into kTetraEdges
  double angle_sum = 0.0;  ///< sum of interior dihedral angles
};

struct GluingSummary {
  std::vector<EdgeClass> edge_classes;
  int cusps = 0;
  bool orientable = true;
  int link_euler_characteristic = 0;
};

struct GiesekingData {
  IdealTetrahedron tet = regular_ideal_tetrahedron(Model::halfspace);
  std::array<FacePairing, 2> pairings;
  GluingSummary quotient;
  GluingSummary double_cover;  ///< per-tetrahedron edge classes are over 12 edges
  int double_cover_tetrahedra = 2;
  double max_face_error = 0.0;
  double volume = 0.0;
  double double_cover_volume = 0.0;
  bool link_is_klein_bottle = false;
};

namespace detail {

inline int tetra_edge_index(int a, int b) {
  if (a > b) std::swap(a, b);
  for (int e = 0; e < 6; ++e) {
    if (kTetraEdges[static_cast<std::size_t>(e)] == std::pair<int, int>{a, b}) return e;
  }
  throw ArgumentError("not a tetrahedron edge");
}

/// Edge classes, cusps and orientability of `sheets` copies of a tetrahedron glued by
/// the pairings; with two sheets, orientation-reversing pairings cross between them.
inline GluingSummary glue(const IdealTetrahedron& tet, const std::array<FacePairing, 2>& pairings, int sheets) {
  ParityDsu edges(6 * sheets), verts(4 * sheets), ends(12 * sheets);
  // Orientation labels per tetrahedron copy; a gluing is consistent when the labels
  // differ for an even vertex map.
  ParityDsu orient(sheets);
  bool orientable = true;
  auto end_id = [](int sheet, int e, int which) { return sheet * 12 + 2 * e + which; };
  for (const auto& p : pairings) {
    const auto vm = p.vertex_map();
    const int even = permutation_sign(vm) == 1 ? 1 : 0;
    for (int s = 0; s < sheets; ++s) {
      const int t = sheets == 2 && p.reverses_orientation ? 1 - s : s;
      orientable = orient.unite(s, t, even) && orientable;
      for (int k = 0; k < 3; ++k) verts.unite(4 * s + p.source[k], 4 * t + p.target[k]);
      for (int k = 0; k < 3; ++k) {
        for (int l = k + 1; l < 3; ++l) {
          const int es = tetra_edge_index(p.source[k], p.source[l]);
          const int et = tetra_edge_index(p.target[k], p.target[l]);
          edges.unite(6 * s + es, 6 * t + et);
          // End of edge es at source[k] goes to the end of et at target[k].
          const int wk = p.source[k] == kTetraEdges[static_cast<std::size_t>(es)].first ? 0 : 1;
          const int wt = p.target[k] == kTetraEdges[static_cast<std::size_t>(et)].first ? 0 : 1;
          ends.unite(end_id(s, es, wk), end_id(t, et, wt));
          ends.unite(end_id(s, es, 1 - wk), end_id(t, et, 1 - wt));
        }
      }
    }
  }
  GluingSummary out;
  out.orientable = orientable;
  std::map<int, EdgeClass> classes;
  for (int s = 0; s < sheets; ++s) {
    for (int e = 0; e < 6; ++e) {
      auto& c = classes[edges.find(6 * s + e).first];
      c.edges.push_back(6 * s + e);
      const auto& [a, b] = kTetraEdges[static_cast<std::size_t>(e)];
      c.angle_sum += dihedral_angle(tet, a, b);
    }
  }
  for (auto& [root, c] : classes) out.edge_classes.push_back(c);
  out.cusps = verts.classes();
  // Cusp link: one triangle per ideal vertex, one edge per face corner, one vertex per
  // class of edge ends.
  const int link_faces = 4 * sheets, link_edges = 12 * sheets / 2;
  out.link_euler_characteristic = ends.classes() - link_edges + link_faces;
  return out;
}

}  // namespace detail

/// The Gieseking manifold from the regular ideal tetrahedron with vertices
/// 0: inf, 1: 0, 2: 1, 3: omega = e^{i pi/3}, faces A = {inf, 0, 1}, B = {inf, 1, omega},
/// C = {inf, 0, omega}, D = {0, 1, omega}. A -> B rotates by 2 pi/3 about the axis through
/// inf; D -> C rotates by 2 pi/3 about the axis through 0. Each rotation maps T to
/// itself and is followed by the reflection in the target face, so that the pairing
/// carries T to its neighbour across that face.
inline GiesekingData gieseking_pairing(double tol = 1e-10) {
  const cplx omega = std::polar(1.0, std::numbers::pi / 3.0);
  const cplx rho = std::polar(1.0, 2.0 * std::numbers::pi / 3.0);
  const std::array<ExtComplex, 4> z{ExtComplex::infinity(), cplx(0.0), cplx(1.0), omega};

  GiesekingData g;
  g.tet = IdealTetrahedron::from_halfspace(z);

  const cplx c = (1.0 + omega) / 3.0;
  const MobiusMap rot1(rho, c * (1.0 - rho), 0.0, 1.0);
  const MobiusMap rot2 = MobiusMap::three_point(z[1], z[2], z[3], z[1], z[3], z[0]);
  if (!near(rot2.apply(z[0]), z[2], tol)) throw GeometryError("rotation about 0 does not permute the vertices");

  auto make = [&](std::string name, std::array<int, 3> src, std::array<int, 3> dst, const MobiusMap& rot) {
    FacePairing p;
    p.name = std::move(name);
    p.source = src;
    p.target = dst;
    p.mobius = reflection_mobius(z[dst[0]], z[dst[1]], z[dst[2]]) * conj(rot);
    p.reverses_orientation = true;
    return p;
  };
  g.pairings = {make("A->B", {0, 1, 2}, {0, 2, 3}, rot1), make("D->C", {1, 2, 3}, {1, 3, 0}, rot2)};

  for (const auto& p : g.pairings) {
    for (int k = 0; k < 3; ++k) {
      const ExtComplex img = p.apply(z[p.source[k]]);
      const ExtComplex want = z[p.target[k]];
      // A rounded zero denominator leaves the image of infinity large but finite.
      if (want.is_infinite()) {
        const double err = img.is_infinite() ? 0.0 : 1.0 / std::abs(img.value());
        g.max_face_error = std::max(g.max_face_error, err);
      } else {
        if (img.is_infinite()) throw GeometryError("pairing " + p.name + " misses its face");
        g.max_face_error = std::max(g.max_face_error, std::abs(img.value() - want.value()));
      }
    }
  }
  if (g.max_face_error > tol) throw GeometryError("face pairing exceeds the matching tolerance");

  g.quotient = detail::glue(g.tet, g.pairings, 1);
  g.double_cover = detail::glue(g.tet, g.pairings, 2);
  g.volume = tetra_volume(g.tet);
  g.double_cover_volume = 2.0 * g.volume;
  // A torus cusp of a non-orientable manifold lifts to two cusps in the orientation cover.
  g.link_is_klein_bottle = g.quotient.link_euler_characteristic == 0 && !g.quotient.orientable &&
                           g.double_cover.cusps == g.quotient.cusps;
  return g;
}

// ---------------------------------------------------------------------------
// Combinatorial surfaces

struct CombinatorialSurface {
  std::string name;
  int V = 0;
  int E = 0;
  int F = 0;
  int chi = 0;
  bool orientable = true;
  int boundary_components = 0;  ///< counted as punctures
  /// Orientable genus, or the number of cross-caps when non-orientable.
  int genus = 0;
};

/// Closed-form bookkeeping: chi = 2 - 2g - p (orientable) or 2 - k - p.
inline CombinatorialSurface surface_from_invariants(std::string name, bool orientable, int genus, int punctures) {
  CombinatorialSurface s;
  s.name = std::move(name);
  s.orientable = orientable;
  s.genus = genus;
  s.boundary_components = punctures;
  s.chi = (orientable ? 2 - 2 * genus : 2 - genus) - punctures;
  return s;
}

/// Polygonal 2-complex: faces are cycles of (edge, direction) with +1 meaning the edge
/// is traversed from its first to its second endpoint.
struct CellComplex {
  int num_vertices = 0;
  std::vector<std::array<int, 2>> edges;
  std::vector<std::vector<std::pair<int, int>>> faces;
  std::vector<std::pair<int, int>> vertex_glue;
  std::vector<std::array<int, 3>> edge_glue;  ///< (e, f, sign): e's direction is f's when sign = +1

  int add_vertex() { return num_vertices++; }
  int add_edge(int a, int b) {
    edges.push_back({a, b});
    return static_cast<int>(edges.size()) - 1;
  }
};

/// Quotient counts, boundary circles and orientability of a glued cell complex.
inline CombinatorialSurface quotient_surface(const CellComplex& cx, std::string name) {
  detail::ParityDsu verts(cx.num_vertices), edges(static_cast<int>(cx.edges.size()));
  for (const auto& [a, b] : cx.vertex_glue) verts.unite(a, b);
  for (const auto& g : cx.edge_glue) {
    if (!edges.unite(g[0], g[1], g[2] == 1 ? 0 : 1)) throw GeometryError("inconsistent edge identification");
    const auto& e = cx.edges[static_cast<std::size_t>(g[0])];
    const auto& f = cx.edges[static_cast<std::size_t>(g[1])];
    const int f0 = g[2] == 1 ? f[0] : f[1], f1 = g[2] == 1 ? f[1] : f[0];
    verts.unite(e[0], f0);
    verts.unite(e[1], f1);
  }
  CombinatorialSurface s;
  s.name = std::move(name);
  s.V = verts.classes();
  s.E = edges.classes();
  s.F = static_cast<int>(cx.faces.size());
  s.chi = s.V - s.E + s.F;

  // Sides of each quotient edge: (face, direction relative to the class root).
  std::map<int, std::vector<std::pair<int, int>>> sides;
  for (int fi = 0; fi < s.F; ++fi) {
    for (const auto& [e, dir] : cx.faces[static_cast<std::size_t>(fi)]) {
      const auto [root, par] = edges.find(e);
      sides[root].push_back({fi, par ? -dir : dir});
    }
  }
  detail::ParityDsu orient(s.F);
  bool orientable = true;
  detail::ParityDsu bverts(cx.num_vertices);
  std::set<int> bnodes;
  for (const auto& [root, list] : sides) {
    if (list.size() > 2) throw GeometryError("edge shared by more than two faces");
    if (list.size() == 2) {
      // Consistent orientation traverses a shared edge in opposite directions.
      const int rel = list[0].second == list[1].second ? 1 : 0;
      orientable = orient.unite(list[0].first, list[1].first, rel) && orientable;
    } else {
      const auto& e = cx.edges[static_cast<std::size_t>(root)];
      const int a = verts.find(e[0]).first, b = verts.find(e[1]).first;
      bverts.unite(a, b);
      bnodes.insert(a);
      bnodes.insert(b);
    }
  }
  std::set<int> comps;
  for (int v : bnodes) comps.insert(bverts.find(v).first);
  s.boundary_components = static_cast<int>(comps.size());
  s.orientable = orientable;
  s.genus = orientable ? (2 - s.chi - s.boundary_components) / 2 : 2 - s.chi - s.boundary_components;
  return s;
}

namespace detail {

inline constexpr std::array<std::array<int, 3>, 4> kFaces{{{0, 1, 2}, {0, 2, 3}, {0, 1, 3}, {1, 2, 3}}};

inline int face_index(std::array<int, 3> f) {
  std::sort(f.begin(), f.end());
  for (int i = 0; i < 4; ++i) {
    if (kFaces[static_cast<std::size_t>(i)] == f) return i;
  }
  throw ArgumentError("not a face");
}

// Cells of the surface S inside T: it meets each face F in a circle split at the three
// points (F, e); the arc of that circle near corner v is (F, v); across each edge e a
// "crossing" arc joins the points (F1, e), (F2, e); near each ideal vertex v a hexagon.
struct SchwarzCells {
  CellComplex cx;
  std::map<std::pair<int, int>, int> point;  // (face, edge) -> vertex
  std::map<std::pair<int, int>, int> arc;    // (face, corner vertex) -> edge
};

inline void add_schwarz_copy(SchwarzCells& s) {
  auto& cx = s.cx;
  std::map<std::pair<int, int>, int> point, arc;
  for (int f = 0; f < 4; ++f) {
    for (int a = 0; a < 3; ++a) {
      for (int b = a + 1; b < 3; ++b) {
        const auto& fv = kFaces[static_cast<std::size_t>(f)];
        point[{f, tetra_edge_index(fv[a], fv[b])}] = cx.add_vertex();
      }
    }
  }
  // Arc (F, v) joins the points on the two edges of F through v.
  for (int f = 0; f < 4; ++f) {
    const auto& fv = kFaces[static_cast<std::size_t>(f)];
    for (int k = 0; k < 3; ++k) {
      const int v = fv[k], u1 = fv[(k + 1) % 3], u2 = fv[(k + 2) % 3];
      arc[{f, v}] = cx.add_edge(point[{f, tetra_edge_index(v, u1)}], point[{f, tetra_edge_index(v, u2)}]);
    }
  }
  std::map<int, int> cross;
  for (int e = 0; e < 6; ++e) {
    std::vector<int> fs;
    const auto& [a, b] = kTetraEdges[static_cast<std::size_t>(e)];
    for (int f = 0; f < 4; ++f) {
      const auto& fv = kFaces[static_cast<std::size_t>(f)];
      if (std::count(fv.begin(), fv.end(), a) && std::count(fv.begin(), fv.end(), b)) fs.push_back(f);
    }
    cross[e] = cx.add_edge(point[{fs[0], e}], point[{fs[1], e}]);
  }
  // Hexagon at v: walk around the three faces at v, alternating arcs and crossings.
  for (int v = 0; v < 4; ++v) {
    std::vector<int> nb;
    for (int u = 0; u < 4; ++u) {
      if (u != v) nb.push_back(u);
    }
    std::vector<std::pair<int, int>> cycle;
    int cur_vertex = point[{face_index({v, nb[0], nb[1]}), tetra_edge_index(v, nb[0])}];
    for (int k = 0; k < 3; ++k) {
      const int e1 = nb[static_cast<std::size_t>(k)], e2 = nb[static_cast<std::size_t>((k + 1) % 3)];
      const int f = face_index({v, e1, e2});
      const int arc_e = arc[{f, v}];
      const int dir = cx.edges[static_cast<std::size_t>(arc_e)][0] == cur_vertex ? 1 : -1;
      cycle.push_back({arc_e, dir});
      cur_vertex = dir == 1 ? cx.edges[static_cast<std::size_t>(arc_e)][1] : cx.edges[static_cast<std::size_t>(arc_e)][0];
      const int ce = cross[tetra_edge_index(v, e2)];
      const int cdir = cx.edges[static_cast<std::size_t>(ce)][0] == cur_vertex ? 1 : -1;
      cycle.push_back({ce, cdir});
      cur_vertex = cdir == 1 ? cx.edges[static_cast<std::size_t>(ce)][1] : cx.edges[static_cast<std::size_t>(ce)][0];
    }
    cx.faces.push_back(cycle);
  }
  s.point = point;
  s.arc = arc;
}

// Glues copy `from`'s cells on the source face to copy `to`'s cells on the target face.
inline void glue_schwarz(CellComplex& cx, const std::vector<SchwarzCells>& copies, const FacePairing& p, int from,
                         int to) {
  const auto vm = p.vertex_map();
  const int fs = face_index(p.source), ft = face_index(p.target);
  const auto& a = copies[static_cast<std::size_t>(from)];
  const auto& b = copies[static_cast<std::size_t>(to)];
  for (int k = 0; k < 3; ++k) {
    for (int l = k + 1; l < 3; ++l) {
      const int es = tetra_edge_index(p.source[k], p.source[l]);
      const int et = tetra_edge_index(vm[p.source[k]], vm[p.source[l]]);
      cx.vertex_glue.push_back({a.point.at({fs, es}), b.point.at({ft, et})});
    }
  }
  for (int k = 0; k < 3; ++k) {
    const int v = p.source[k];
    const int e = a.arc.at({fs, v}), f = b.arc.at({ft, vm[v]});
    // Direction: image of e's first endpoint is f's first endpoint?
    const int first = cx.edges[static_cast<std::size_t>(e)][0];
    int image = -1;
    for (const auto& [key, id] : a.point) {
      if (id == first) {
        const auto& [ea, eb] = kTetraEdges[static_cast<std::size_t>(key.second)];
        image = b.point.at({ft, tetra_edge_index(vm[ea], vm[eb])});
      }
    }
    cx.edge_glue.push_back({e, f, cx.edges[static_cast<std::size_t>(f)][0] == image ? 1 : -1});
  }
}

}  // namespace detail

struct SchwarzBookkeeping {
  CombinatorialSurface in_tetrahedron;  ///< S: sphere minus 4 points
  CombinatorialSurface quotient;        ///< S glued in the Gieseking manifold
  CombinatorialSurface lift;            ///< preimage in the orientation double cover
  CombinatorialSurface klein_sum_formula;
  CombinatorialSurface punctured_torus;
  double punctured_torus_area_bound = 0.0;  ///< -2 pi chi, the Gauss-equation bound
};

/// Euler-characteristic bookkeeping for S, its quotient and its lift.
inline SchwarzBookkeeping schwarz_surface_bookkeeping() {
  const auto g = gieseking_pairing();
  SchwarzBookkeeping out;

  detail::SchwarzCells single;
  detail::add_schwarz_copy(single);
  out.in_tetrahedron = quotient_surface(single.cx, "S (in T)");

  CellComplex glued = single.cx;
  for (const auto& p : g.pairings) detail::glue_schwarz(glued, {single}, p, 0, 0);
  out.quotient = quotient_surface(glued, "S / pairings");

  detail::SchwarzCells two;
  detail::add_schwarz_copy(two);
  const auto first = two;
  detail::add_schwarz_copy(two);
  detail::SchwarzCells second = two;  // second copy's ids live in two.point / two.arc
  std::vector<detail::SchwarzCells> copies{first, second};
  for (const auto& p : g.pairings) {
    for (int s = 0; s < 2; ++s) {
      const int t = p.reverses_orientation ? 1 - s : s;
      detail::glue_schwarz(two.cx, copies, p, s, t);
    }
  }
  out.lift = quotient_surface(two.cx, "lift to the double cover");

  const auto klein = surface_from_invariants("Klein bottle", false, 2, 0);
  out.klein_sum_formula = surface_from_invariants("K#K", false, 4, 0);
  out.klein_sum_formula.chi = klein.chi + klein.chi - 2;
  out.punctured_torus = surface_from_invariants("once-punctured torus", true, 1, 1);
  out.punctured_torus_area_bound = -2.0 * std::numbers::pi * out.punctured_torus.chi;
  return out;
}

inline nlohmann::json surface_json(const CombinatorialSurface& s) {
  return {{"name", s.name}, {"V", s.V},   {"E", s.E},
          {"F", s.F},       {"chi", s.chi}, {"orientable", s.orientable},
          {"boundary_components", s.boundary_components}, {"genus", s.genus}};
}

}  // namespace cuspmin
