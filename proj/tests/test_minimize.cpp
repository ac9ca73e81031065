#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "cuspmin/discrete_area.hpp"
#include "cuspmin/minimize.hpp"
#include "cuspmin/periodic_mesh.hpp"

using namespace cuspmin;

namespace {

PeriodicMesh random_graph(std::uint64_t seed, int n, double lo, double hi) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  PeriodicGraphFn g(n, n, 1.0);
  for (auto& h : g.heights) h = u(rng);
  return graph_mesh(CuspEnd(), g);
}

double max_coord_diff(const PeriodicMesh& a, const PeriodicMesh& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.num_vertices(); ++i) d = std::max(d, (a.vertices[i] - b.vertices[i]).cwiseAbs().maxCoeff());
  return d;
}

}  // namespace

TEST(Minimize, ZeroIterationsIsIdentity) {
  SolveConfig cfg;
  cfg.max_iter = 0;
  const PeriodicMesh m = random_graph(3, 6, 1.0, 1.4);
  const SolveResult r = minimize(PsiProfile::identity(), m, cfg);
  EXPECT_EQ(r.iterations, 0);
  EXPECT_EQ(max_coord_diff(r.mesh, m), 0.0);
  EXPECT_EQ(r.initial_area, r.final_area);
  EXPECT_NEAR(r.initial_area, mesh_area(PsiProfile::identity(), m), 1e-14);
}

TEST(Minimize, VerticalPlaneIsAlreadyCritical) {
  SolveConfig cfg;
  cfg.mobility = {0.0, 1.0, 0.0};
  const PeriodicMesh strip = vertical_strip(1.0, 0.6, 1.6, 12, 12);
  const SolveResult r = minimize(PsiProfile::identity(), strip, cfg);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.iterations, 0);
  EXPECT_LT(r.residual, cfg.grad_tol);
}

TEST(Minimize, PerturbedPlaneRelaxesBack) {
  SolveConfig cfg;
  cfg.mobility = {0.0, 1.0, 0.0};
  const PeriodicMesh strip = vertical_strip(1.0, 0.6, 1.6, 12, 12);
  PeriodicMesh m = strip;
  perturb_interior(m, 1, 0.05, 11);
  const SolveResult r = minimize(PsiProfile::identity(), m, cfg);
  ASSERT_TRUE(r.converged);
  EXPECT_LT(r.residual, cfg.grad_tol);
  EXPECT_LT(max_coord_diff(r.mesh, strip), 1e-6);
  EXPECT_NEAR(r.final_area, mesh_area(PsiProfile::identity(), strip), 1e-10);
}

TEST(Minimize, AreaIsMonotoneOverRandomStarts) {
  SolveConfig cfg;
  cfg.max_iter = 200;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const SolveResult r = minimize(PsiProfile::identity(), random_graph(seed, 6, 1.0, 1.5), cfg);
    ASSERT_FALSE(r.area_history.empty());
    for (std::size_t i = 1; i < r.area_history.size(); ++i) {
      EXPECT_LE(r.area_history[i], r.area_history[i - 1] * (1.0 + cfg.value_noise)) << "seed " << seed;
    }
    EXPECT_LE(r.final_area, r.initial_area);
  }
}

TEST(Minimize, CeilingIsRespected) {
  SolveConfig cfg;
  cfg.mobility = {0.0, 0.0, 1.0};
  cfg.z_ceiling = 1.2;
  cfg.max_iter = 300;
  const SolveResult r = minimize(PsiProfile::identity(), random_graph(8, 6, 1.0, 1.2), cfg);
  for (const auto& v : r.mesh.vertices) EXPECT_LE(v.z(), 1.2);
}

TEST(Minimize, GradientMethodAlsoDescends) {
  SolveConfig cfg;
  cfg.method = DescentMethod::gradient;
  cfg.mobility = {0.0, 1.0, 0.0};
  cfg.max_iter = 2000;
  cfg.grad_tol = 1e-6;
  PeriodicMesh m = vertical_strip(1.0, 0.6, 1.6, 6, 6);
  perturb_interior(m, 1, 0.05, 2);
  const SolveResult r = minimize(PsiProfile::identity(), m, cfg);
  EXPECT_TRUE(r.converged);
  EXPECT_LT(r.final_area, r.initial_area);
}

TEST(SolveConfig, ValidationAndJson) {
  SolveConfig c;
  EXPECT_NO_THROW(c.validate());
  c.backtrack = 1.0;
  EXPECT_THROW(c.validate(), ArgumentError);
  c = SolveConfig{};
  c.grad_tol = 0.0;
  EXPECT_THROW(c.validate(), ArgumentError);

  const auto j = nlohmann::json::parse(R"({"grad_tol": 1e-9, "method": "gradient", "mobility": [0, 1, 0],
                                          "z_ceiling": 2.5, "value_noise": 0, "theta0": 0.3})");
  const SolveConfig p = solve_config_from_json(j);
  EXPECT_EQ(p.grad_tol, 1e-9);
  EXPECT_EQ(p.method, DescentMethod::gradient);
  EXPECT_EQ(p.mobility, Eigen::Vector3d(0, 1, 0));
  ASSERT_TRUE(p.z_ceiling.has_value());
  EXPECT_EQ(*p.z_ceiling, 2.5);
  EXPECT_EQ(p.value_noise, 0.0);
  EXPECT_EQ(p.theta0, 0.3);

  EXPECT_THROW(solve_config_from_json(nlohmann::json{{"method", "newton"}}), ArgumentError);
  EXPECT_THROW(solve_config_from_json(nlohmann::json{{"mobility", {1, 1}}}), ArgumentError);
  EXPECT_THROW(solve_config_from_json(nlohmann::json{{"armijo", 1.5}}), ArgumentError);
}
