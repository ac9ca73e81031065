#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "cuspmin/cusp_geometry.hpp"
#include "cuspmin/verify/first_variation.hpp"
#include "cuspmin/verify/riemann_fd.hpp"
#include "support/generators.hpp"

using namespace cuspmin;

namespace {

verify::MetricField conformal_field(const PsiProfile& psi) {
  return [psi](const Eigen::Vector3d& x) {
    const double s = psi(x.z());
    return Eigen::Matrix3d(Eigen::Matrix3d::Identity() / (s * s));
  };
}

// Samples kept away from the ramp knots, where the profile is only C^2.
bool near_knot(const PsiProfile& psi, double z, double margin) {
  for (double k : psi.knots()) {
    if (std::abs(z - k) < margin) return true;
  }
  return false;
}

}  // namespace

TEST(MetricEval, Examples) {
  const auto id = PsiProfile::identity();
  EXPECT_TRUE(metric_eval(id, {0, 0, 1}).g.isApprox(Eigen::Matrix3d::Identity()));
  EXPECT_TRUE(metric_eval(id, {3, -1, 2}).g.isApprox(Eigen::Matrix3d::Identity() / 4.0));
  const auto plateau = PsiProfile::ramp(1.0, 2.0, 1.5);
  EXPECT_TRUE(metric_eval(plateau, {0, 0, 10}).g.isApprox(Eigen::Matrix3d::Identity() * 4.0 / 9.0));
  EXPECT_THROW(metric_eval(id, {0, 0, 0.4}), DomainError);
  EXPECT_THROW(CuspPoint::checked(0, 0, 0.3), DomainError);
}

TEST(MetricEval, PositiveDefiniteEverywhere) {
  props::Gen gen(3);
  for (int i = 0; i < 200; ++i) {
    const auto psi = gen.ramp();
    const auto m = metric_eval(psi, {gen.uniform(-5, 5), gen.uniform(-5, 5), gen.uniform(0.5, 20)});
    EXPECT_TRUE(m.is_symmetric());
    EXPECT_TRUE(m.is_positive_definite());
  }
}

TEST(SectionalCurvature, HyperbolicCase) {
  const auto id = PsiProfile::identity();
  for (double z = 0.5; z < 50; z *= 1.3) {
    const auto k = sectional_curvature(id, z);
    EXPECT_NEAR(k.horizontal, -1.0, 1e-12);
    EXPECT_NEAR(k.vertical, -1.0, 1e-12);
  }
}

TEST(SectionalCurvature, FlatCriticalSlab) {
  const auto psi = PsiProfile::ramp(1.0, 2.0, 1.5);
  const auto k = sectional_curvature(psi, 3.0);
  EXPECT_EQ(k.horizontal, 0.0);
  EXPECT_EQ(k.vertical, 0.0);
}

TEST(SectionalCurvature, PowerProfileMatchesOracle) {
  const auto psi = PsiProfile::power(2.0);
  const auto k = sectional_curvature(psi, 2.0);
  EXPECT_DOUBLE_EQ(k.horizontal, -16.0);
  EXPECT_DOUBLE_EQ(k.vertical, -8.0);
  const auto g = conformal_field(psi);
  const Eigen::Vector3d x(0.3, -0.2, 2.0);
  EXPECT_NEAR(verify::sectional_curvature_fd(g, x, 0, 1, 1e-3), -16.0, 1e-6);
  EXPECT_NEAR(verify::sectional_curvature_fd(g, x, 0, 2, 1e-3), -8.0, 1e-6);
  EXPECT_NEAR(verify::sectional_curvature_fd(g, x, 1, 2, 1e-3), -8.0, 1e-6);
}

TEST(SectionalCurvature, RandomRampsMatchOracle) {
  props::Gen gen(5);
  for (int trial = 0; trial < 10; ++trial) {
    const auto psi = gen.ramp();
    const auto g = conformal_field(psi);
    for (int s = 0; s < 10; ++s) {
      double z;
      do {
        z = gen.uniform(0.6, 4.0);
      } while (near_knot(psi, z, 0.01));
      const auto k = sectional_curvature(psi, z);
      const Eigen::Vector3d x(0, 0, z);
      EXPECT_NEAR(verify::sectional_curvature_fd(g, x, 0, 1, 1e-3), k.horizontal, 1e-6) << "z=" << z;
      EXPECT_NEAR(verify::sectional_curvature_fd(g, x, 1, 2, 1e-3), k.vertical, 1e-6) << "z=" << z;
    }
  }
}

TEST(TorusMeanCurvature, Examples) {
  EXPECT_DOUBLE_EQ(torus_mean_curvature(PsiProfile::identity(), 5.0), 1.0);
  const auto plateau = PsiProfile::ramp(1.0, 2.0, 1.5);
  EXPECT_EQ(torus_mean_curvature(plateau, 2.0), 0.0);
  const auto half = PsiProfile::ramp(1.0, 1.4, 1.2);
  EXPECT_NEAR(torus_mean_curvature(half, 1.2), 0.5, 1e-15);
}

TEST(TorusMeanCurvature, FirstVariationOracle) {
  const auto psi = PsiProfile::ramp(1.0, 1.4, 1.2);
  const CuspEnd end({0.3, 0.0}, {0.1, 0.25});
  const verify::LevelMetric g = [&](double z) {
    const double s = psi(z);
    return Eigen::Matrix3d(Eigen::Matrix3d::Identity() / (s * s));
  };
  EXPECT_NEAR(verify::level_mean_curvature_fd(g, 1.2, 1e-4), 0.5, 1e-5);
  // Same quantity from torus_quantities' area, the normalized first variation.
  auto area = [&](double z) { return torus_quantities(end, psi, z).area; };
  for (double z : {0.7, 1.05, 1.2, 1.3, 2.0}) {
    const double h = 1e-5;
    const double dlog = (std::log(area(z + h)) - std::log(area(z - h))) / (2 * h);
    EXPECT_NEAR(-0.5 * dlog * psi(z), torus_mean_curvature(psi, z), 1e-5);
  }
}

TEST(RescaleEnd, Examples) {
  const CuspEnd end({0.8, 0.0}, {0.0, 0.5});
  const auto psi = PsiProfile::ramp(1.0, 2.0, 1.5);
  const auto same = rescale_end(end, psi, 1.0);
  EXPECT_EQ(same.end.v1(), end.v1());
  EXPECT_EQ(same.psi, psi);
  EXPECT_DOUBLE_EQ(rescale_end(end, psi, 4.0).end.lambda(), 0.2);
  EXPECT_THROW(rescale_end(end, psi, 0.9), ArgumentError);
}

TEST(RescaleEnd, CurvatureChainRule) {
  props::Gen gen(8);
  for (int trial = 0; trial < 20; ++trial) {
    const auto psi = gen.ramp();
    const double z0 = gen.uniform(1.0, 10.0);
    const auto r = rescale_end(gen.end(), psi, z0);
    for (int s = 0; s < 20; ++s) {
      const double z = gen.uniform(0.5, 5.0);
      const auto a = sectional_curvature(r.psi, z);
      const auto b = sectional_curvature(psi, z0 * z);
      EXPECT_NEAR(a.horizontal, b.horizontal, 1e-10);
      EXPECT_NEAR(a.vertical, b.vertical, 1e-10);
    }
    EXPECT_NEAR(r.psi.bound_d1(), psi.bound_d1(), 1e-12);
    EXPECT_NEAR(r.psi.bound_psi_d2(), psi.bound_psi_d2(), 1e-12);
  }
}

TEST(RescaleEnd, Composition) {
  props::Gen gen(9);
  for (int trial = 0; trial < 20; ++trial) {
    const auto psi = gen.ramp();
    const auto end = gen.end();
    const double z0 = gen.uniform(1, 5), z1 = gen.uniform(1, 5);
    const auto a = rescale_end(rescale_end(end, psi, z1).end, rescale_end(end, psi, z1).psi, z0);
    const auto b = rescale_end(end, psi, z0 * z1);
    EXPECT_LE((a.end.v1() - b.end.v1()).norm(), 1e-12);
    EXPECT_LE((a.end.v2() - b.end.v2()).norm(), 1e-12);
    for (double z = 0.5; z < 8; z += 0.41) {
      EXPECT_NEAR(a.psi(z), b.psi(z), 1e-12);
      EXPECT_NEAR(a.psi.d1(z), b.psi.d1(z), 1e-12);
    }
  }
}

TEST(VerticalArcLength, Examples) {
  const auto id = PsiProfile::identity();
  EXPECT_EQ(vertical_arc_length(id, 1.3, 1.3), 0.0);
  EXPECT_NEAR(vertical_arc_length(id, 1.0, std::exp(1.0)), 1.0, 1e-9);
  EXPECT_NEAR(vertical_arc_length(id, 1.0, 2.0), 0.693147180559945309, 1e-9);
  EXPECT_THROW(vertical_arc_length(id, 2.0, 1.0), ArgumentError);
  EXPECT_THROW(vertical_arc_length(id, 0.4, 1.0), DomainError);
}

TEST(TorusQuantities, ExamplesAndDecay) {
  const CuspEnd end({1, 0}, {0, 1});
  const auto id = PsiProfile::identity();
  const auto q1 = torus_quantities(end, id, 1.0);
  EXPECT_DOUBLE_EQ(q1.area, 1.0);
  EXPECT_DOUBLE_EQ(q1.shortest_generator_length, 1.0);
  const auto q2 = torus_quantities(end, id, 2.0);
  EXPECT_DOUBLE_EQ(q2.area, 0.25);
  EXPECT_DOUBLE_EQ(q2.shortest_generator_length, 0.5);
  for (double s : {0.0, 1.0, 2.0}) {
    EXPECT_NEAR(torus_quantities(end, id, std::exp(s)).shortest_generator_length * std::exp(s), 1.0, 1e-12);
  }
}

TEST(CuspEnd, Invariants) {
  EXPECT_THROW(CuspEnd({1, 0}, {2, 0}), ArgumentError);
  const CuspEnd e({3, 4}, {0, 1});
  EXPECT_DOUBLE_EQ(e.lambda(), 5.0);
  EXPECT_DOUBLE_EQ(e.cell_area(), 3.0);
}
