#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <numbers>

#include "cuspmin/gieseking.hpp"
#include "cuspmin/ideal_tetrahedron.hpp"
#include "cuspmin/verify/clausen.hpp"
#include "support/generators.hpp"

using namespace cuspmin;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kRegularVolume = 1.014941606409653625;  // 3 L(pi/3), series oracle at 30 digits

IdealTetrahedron random_tetrahedron(props::Gen& gen) {
  for (;;) {
    std::array<ExtComplex, 4> z;
    for (auto& p : z) p = gen.complex(2.0);
    bool ok = true;
    for (int i = 0; i < 4; ++i) {
      for (int j = i + 1; j < 4; ++j) ok = ok && std::abs(z[i].value() - z[j].value()) > 0.05;
    }
    // Keep away from concyclic configurations, where angles degenerate to 0 and pi.
    const cplx cr = (z[3].value() - z[1].value()) * (z[2].value() - z[0].value()) /
                    ((z[3].value() - z[0].value()) * (z[2].value() - z[1].value()));
    if (ok && std::abs(cr.imag()) > 0.05) return IdealTetrahedron::from_halfspace(z);
  }
}

// Link-triangle oracle: sending vertex 0 to infinity by w = 1/(z - z0) makes the other
// three vertices a Euclidean triangle whose angle at vertex k is the dihedral angle of
// edge (0, k).
std::array<double, 3> link_angles(const IdealTetrahedron& tet) {
  const auto& z = tet.halfspace();
  std::array<cplx, 3> w;
  for (int k = 1; k < 4; ++k) w[k - 1] = 1.0 / (z[k].value() - z[0].value());
  std::array<double, 3> out{};
  for (int k = 0; k < 3; ++k) {
    const double a = std::abs(w[(k + 1) % 3] - w[(k + 2) % 3]);
    const double b = std::abs(w[k] - w[(k + 1) % 3]), c = std::abs(w[k] - w[(k + 2) % 3]);
    out[k] = std::acos((b * b + c * c - a * a) / (2 * b * c));
  }
  return out;
}

}  // namespace

TEST(Lobachevsky, SpecialValues) {
  EXPECT_EQ(lobachevsky(0.0), 0.0);
  EXPECT_NEAR(lobachevsky(kPi / 2), 0.0, 1e-9);
  EXPECT_NEAR(lobachevsky(kPi / 6), 0.507470803204826812, 1e-12);
  EXPECT_NEAR(lobachevsky(kPi / 3), 0.338313868803217875, 1e-12);
  EXPECT_NEAR(lobachevsky(0.4), 0.492824437197660088, 1e-12);
  EXPECT_NEAR(lobachevsky(1.0), 0.363573025431639624, 1e-12);
  EXPECT_NEAR(lobachevsky(2.5), -0.496410066273478359, 1e-12);
}

TEST(Lobachevsky, MatchesSeriesOracle) {
  for (double t = 0.01; t < kPi / 2; t += 0.0371) {
    EXPECT_NEAR(lobachevsky(t), verify::lobachevsky_series(t), 1e-12) << t;
  }
}

TEST(Lobachevsky, OddPeriodicMaximalAtPiOverSix) {
  double best = -1.0, arg = 0.0;
  for (int i = 0; i <= 3000; ++i) {
    const double t = kPi / 2 * i / 3000.0;
    const double v = lobachevsky(t);
    EXPECT_NEAR(lobachevsky(-t), -v, 1e-9);
    EXPECT_NEAR(lobachevsky(t + kPi), v, 1e-9);
    EXPECT_NEAR(lobachevsky(t - 3 * kPi), v, 1e-9);
    if (v > best) {
      best = v;
      arg = t;
    }
  }
  EXPECT_NEAR(arg, kPi / 6, kPi / 3000);
}

TEST(Lobachevsky, DuplicationIdentity) {
  for (double t = 0.05; t < 1.5; t += 0.11) {
    EXPECT_NEAR(lobachevsky(2 * t), 2 * lobachevsky(t) + 2 * lobachevsky(t + kPi / 2), 1e-12);
  }
}

TEST(ModelTransport, RoundTrip) {
  props::Gen gen(201);
  for (int i = 0; i < 100; ++i) {
    const cplx z = gen.complex(5);
    EXPECT_NEAR(halfspace_to_klein(z).norm(), 1.0, 1e-14);
    EXPECT_TRUE(near(klein_to_halfspace(halfspace_to_klein(z)), z, 1e-12 * std::max(1.0, std::norm(z))));
  }
  EXPECT_TRUE(klein_to_halfspace(Eigen::Vector3d::UnitZ()).is_infinite());
  EXPECT_EQ(halfspace_to_klein(ExtComplex::infinity()), Eigen::Vector3d::UnitZ());
}

TEST(RegularTetrahedron, Symmetry) {
  const auto tet = regular_ideal_tetrahedron();
  const auto& v = tet.klein();
  for (const auto& [i, j] : kTetraEdges) EXPECT_NEAR(v[i].dot(v[j]), -1.0 / 3.0, 1e-15);
  for (const auto& p : v) EXPECT_NEAR(p.norm(), 1.0, 1e-15);
}

TEST(RegularTetrahedron, DihedralAngles) {
  for (Model m : {Model::klein, Model::halfspace}) {
    const auto tet = regular_ideal_tetrahedron(m);
    for (const auto& [i, j] : kTetraEdges) {
      EXPECT_NEAR(dihedral_angle(tet, i, j), kPi / 3, 1e-9);
      EXPECT_NEAR(exterior_dihedral_angle(tet, i, j), 2 * kPi / 3, 1e-9);
    }
  }
}

TEST(RegularTetrahedron, Volume) {
  const double oracle = 2.0 * verify::lobachevsky_series(kPi / 6);
  EXPECT_NEAR(oracle, kRegularVolume, 1e-12);
  EXPECT_NEAR(tetra_volume(regular_ideal_tetrahedron()), oracle, 1e-6);
  EXPECT_NEAR(tetra_volume(regular_ideal_tetrahedron()), kRegularVolume, 1e-12);
  EXPECT_NEAR(2 * tetra_volume(regular_ideal_tetrahedron(Model::halfspace)), 2.029883212819307250, 2e-6);
}

TEST(DihedralAngle, DegenerateConfigurations) {
  const auto flat = IdealTetrahedron::from_halfspace({cplx(0), cplx(1), cplx(2), cplx(3)});
  for (const auto& [i, j] : kTetraEdges) {
    const double a = dihedral_angle(flat, i, j);
    EXPECT_TRUE(a < 1e-12 || std::abs(a - kPi) < 1e-12) << a;
  }
  EXPECT_NEAR(tetra_volume(flat), 0.0, 1e-12);
  EXPECT_THROW(IdealTetrahedron::from_halfspace({cplx(0), cplx(1), cplx(1), cplx(3)}), GeometryError);
  EXPECT_THROW(dihedral_angle(flat, 1, 1), ArgumentError);
  EXPECT_THROW(IdealTetrahedron::from_klein({Eigen::Vector3d(0.5, 0, 0), Eigen::Vector3d::UnitX(),
                                             Eigen::Vector3d::UnitY(), Eigen::Vector3d::UnitZ()}),
               GeometryError);
}

TEST(DihedralAngle, RandomTetrahedraMatchLinkOracle) {
  props::Gen gen(202);
  for (int trial = 0; trial < 100; ++trial) {
    const auto tet = random_tetrahedron(gen);
    const auto a = tetra_angles(tet);
    const auto link = link_angles(tet);
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(a.edge[static_cast<std::size_t>(k)], link[static_cast<std::size_t>(k)], 1e-9);
    // Opposite edges agree; each vertex sees angles summing to pi.
    EXPECT_NEAR(a.edge[0], a.edge[5], 1e-9);
    EXPECT_NEAR(a.edge[1], a.edge[4], 1e-9);
    EXPECT_NEAR(a.edge[2], a.edge[3], 1e-9);
    EXPECT_NEAR(a.alpha + a.beta + a.gamma, kPi, 1e-8);
    EXPECT_NEAR(a.edge[0] + a.edge[3] + a.edge[4], kPi, 1e-8);  // vertex 1
    const double vol = tetra_volume(tet);
    EXPECT_GT(vol, 0.0);
    EXPECT_LE(vol, kRegularVolume + 1e-6);
  }
}

TEST(TetraVolume, FixtureVolumes) {
  std::ifstream in(std::string(CUSPMIN_TEST_DATA) + "/tetrahedra.json");
  ASSERT_TRUE(in.good());
  const auto j = nlohmann::json::parse(in);
  for (const auto& t : j.at("tetrahedra")) {
    std::array<ExtComplex, 4> z;
    for (int i = 0; i < 4; ++i) z[i] = cplx(t["halfspace"][i][0].get<double>(), t["halfspace"][i][1].get<double>());
    EXPECT_NEAR(tetra_volume(IdealTetrahedron::from_halfspace(z)), t["volume"].get<double>(), 1e-10);
  }
  EXPECT_NEAR(j["regular_volume"].get<double>(), kRegularVolume, 1e-15);
}

TEST(KleinVolume, SmallTetrahedraAreEuclidean) {
  // Volume density at x is 1 / (1 - |x|^2)^2.
  for (double r : {0.0, 0.3, 0.6}) {
    const Eigen::Vector3d c(r, 0, 0);
    const double e = 1e-3;
    const std::array<Eigen::Vector3d, 4> v{c, c + e * Eigen::Vector3d::UnitX(), c + e * Eigen::Vector3d::UnitY(),
                                           c + e * Eigen::Vector3d::UnitZ()};
    const double expect = e * e * e / 6.0 / std::pow(1 - r * r, 2);
    EXPECT_NEAR(klein_volume(v), expect, 1e-2 * expect) << r;
  }
  const std::array<Eigen::Vector3d, 4> two_ideal{Eigen::Vector3d::UnitX(), Eigen::Vector3d::UnitY(),
                                                 Eigen::Vector3d::Zero(), Eigen::Vector3d(0, 0, 0.5)};
  EXPECT_THROW(klein_volume(two_ideal), ArgumentError);
}

TEST(KleinVolume, IdealApexAgreesWithInteriorLimit) {
  // Pulling the apex toward the sphere converges to the closed-form ideal cone.
  const Eigen::Vector3d a(0.1, 0.1, 0), b(-0.2, 0.1, 0.05), c(0.0, -0.2, 0.1);
  const Eigen::Vector3d dir = Eigen::Vector3d(0.3, 0.5, 0.8).normalized();
  const double ideal = klein_cone_volume(dir, a, b, c);
  double prev = 1e9;
  for (double s : {0.9, 0.99, 0.999}) {
    const double err = std::abs(klein_cone_volume(s * dir, a, b, c) - ideal);
    EXPECT_LT(err, prev);
    prev = err;
  }
  EXPECT_LT(prev, 1e-2 * ideal);
}

TEST(Tessellation, TwentyFourCongruentPieces) {
  const auto tet = regular_ideal_tetrahedron();
  const auto tess = barycentric_tessellation(tet);
  ASSERT_EQ(tess.pieces.size(), 24u);
  EXPECT_LE(tess.center.norm(), 1e-12);
  EXPECT_LE(tess.center_residual, 1e-12);
  double lo = 1e9, hi = 0;
  for (const auto& p : tess.pieces) {
    lo = std::min(lo, p.volume);
    hi = std::max(hi, p.volume);
  }
  EXPECT_LE((hi - lo) / hi, 1e-8);
  EXPECT_NEAR(tess.total_volume, tetra_volume(tet), 1e-6);
  EXPECT_NEAR(tess.total_volume, kRegularVolume, 1e-6);
}

TEST(Tessellation, RejectsIrregular) {
  props::Gen gen(203);
  EXPECT_THROW(barycentric_tessellation(random_tetrahedron(gen)), ArgumentError);
}

TEST(Gieseking, PairingsMatchFaces) {
  const auto g = gieseking_pairing();
  EXPECT_LE(g.max_face_error, 1e-10);
  const auto& z = g.tet.halfspace();
  for (const auto& p : g.pairings) {
    EXPECT_NEAR(std::abs(p.mobius.determinant() - 1.0), 0.0, 1e-12);
    for (int k = 0; k < 3; ++k) EXPECT_TRUE(near(p.apply(z[p.source[k]]), z[p.target[k]], 1e-10));
    // Anti-Mobius pairings induce even vertex permutations.
    EXPECT_TRUE(p.reverses_orientation);
    EXPECT_EQ(permutation_sign(p.vertex_map()), 1);
    // The fourth vertex lands off T: the neighbour across the target face.
    int opp = 6;
    for (int k = 0; k < 3; ++k) opp -= p.source[k];
    const ExtComplex img = p.apply(z[opp]);
    for (const auto& v : z) EXPECT_FALSE(near(img, v, 1e-6));
  }
  for (const auto& [i, j] : kTetraEdges) EXPECT_NEAR(dihedral_angle(g.tet, i, j), kPi / 3, 1e-12);
}

TEST(Gieseking, QuotientStructure) {
  const auto g = gieseking_pairing();
  ASSERT_EQ(g.quotient.edge_classes.size(), 1u);
  EXPECT_EQ(g.quotient.edge_classes[0].edges.size(), 6u);
  EXPECT_NEAR(g.quotient.edge_classes[0].angle_sum, 2 * kPi, 1e-9);
  EXPECT_EQ(g.quotient.cusps, 1);
  EXPECT_FALSE(g.quotient.orientable);
  EXPECT_EQ(g.quotient.link_euler_characteristic, 0);
  EXPECT_TRUE(g.link_is_klein_bottle);
  EXPECT_NEAR(g.volume, kRegularVolume, 1e-12);
}

TEST(Gieseking, OrientationDoubleCover) {
  const auto g = gieseking_pairing();
  EXPECT_EQ(g.double_cover_tetrahedra, 2);
  EXPECT_TRUE(g.double_cover.orientable);
  ASSERT_EQ(g.double_cover.edge_classes.size(), 2u);
  for (const auto& c : g.double_cover.edge_classes) {
    EXPECT_EQ(c.edges.size(), 6u);
    EXPECT_NEAR(c.angle_sum, 2 * kPi, 1e-9);
  }
  EXPECT_EQ(g.double_cover.cusps, 1);
  EXPECT_EQ(g.double_cover.link_euler_characteristic, 0);
  EXPECT_NEAR(g.double_cover_volume, 2.029883212819307250, 2e-6);
}

TEST(SchwarzSurface, Bookkeeping) {
  const auto s = schwarz_surface_bookkeeping();
  EXPECT_EQ(s.in_tetrahedron.V, 12);
  EXPECT_EQ(s.in_tetrahedron.E, 18);
  EXPECT_EQ(s.in_tetrahedron.F, 4);
  EXPECT_EQ(s.in_tetrahedron.chi, -2);
  EXPECT_EQ(s.in_tetrahedron.boundary_components, 4);
  EXPECT_TRUE(s.in_tetrahedron.orientable);
  EXPECT_EQ(s.in_tetrahedron.genus, 0);

  EXPECT_EQ(s.quotient.V, 6);
  EXPECT_EQ(s.quotient.E, 12);
  EXPECT_EQ(s.quotient.chi, -2);
  EXPECT_EQ(s.quotient.boundary_components, 0);
  EXPECT_FALSE(s.quotient.orientable);
  EXPECT_EQ(s.quotient.genus, 4);  // cross-caps: K#K
  EXPECT_EQ(s.klein_sum_formula.chi, s.quotient.chi);

  EXPECT_EQ(s.lift.chi, -4);
  EXPECT_EQ(s.lift.boundary_components, 0);
  EXPECT_TRUE(s.lift.orientable);
  EXPECT_EQ(s.lift.genus, 3);

  EXPECT_EQ(s.punctured_torus.chi, -1);
  EXPECT_NEAR(s.punctured_torus_area_bound, 2 * kPi, 1e-15);
}

TEST(CombinatorialSurface, FormulaAgreesWithComplex) {
  EXPECT_EQ(surface_from_invariants("sphere minus 4", true, 0, 4).chi, -2);
  EXPECT_EQ(surface_from_invariants("genus 3", true, 3, 0).chi, -4);
  EXPECT_EQ(surface_from_invariants("Klein bottle", false, 2, 0).chi, 0);
}
