#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include "cuspmin/mobius.hpp"
#include "support/generators.hpp"

using namespace cuspmin;

namespace {

// Parabolic iff a single eigenvalue +-1 with a nontrivial Jordan block.
bool parabolic_by_eigen(const MobiusMap& m) {
  Eigen::Matrix2cd a;
  a << m.a(), m.b(), m.c(), m.d();
  Eigen::ComplexEigenSolver<Eigen::Matrix2cd> es(a);
  const auto ev = es.eigenvalues();
  const bool repeated = std::abs(ev[0] - ev[1]) < 1e-6;
  const bool unit = std::abs(std::abs(ev[0].real()) - 1.0) < 1e-6 && std::abs(ev[0].imag()) < 1e-6;
  const bool scalar = (a - ev[0] * Eigen::Matrix2cd::Identity()).norm() < 1e-9;
  return repeated && unit && !scalar;
}

}  // namespace

TEST(Mobius, ApplyExamples) {
  const MobiusMap id;
  EXPECT_TRUE(near(id.apply(cplx(2, 3)), cplx(2, 3), 0));
  EXPECT_TRUE(id.apply(ExtComplex::infinity()).is_infinite());
  const auto ta = MobiusMap::translation({2, 1});
  EXPECT_TRUE(near(ta.apply(0.0), cplx(2, 1), 1e-15));
  const MobiusMap m(1, 2, 3, 7);
  EXPECT_TRUE(m.apply(cplx(-7.0 / 3.0)).is_infinite());
  EXPECT_TRUE(near(m.apply(ExtComplex::infinity()), cplx(1.0 / 3.0), 1e-15));
}

TEST(Mobius, InverseOracle) {
  props::Gen gen(21);
  for (int i = 0; i < 200; ++i) {
    const auto m = gen.mobius();
    const ExtComplex z = gen.complex(3);
    EXPECT_TRUE(near(m.apply(m.inverse().apply(z)), z, 1e-10));
    EXPECT_NEAR(std::abs(m.determinant() - 1.0), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(m.inverse().determinant() - 1.0), 0.0, 1e-12);
  }
}

TEST(Mobius, ComposeIsAnAction) {
  props::Gen gen(22);
  const auto m1 = gen.mobius(), m2 = gen.mobius();
  const auto m12 = compose(m1, m2);
  EXPECT_NEAR(std::abs(m12.determinant() - 1.0), 0.0, 1e-12);
  for (int i = 0; i < 100; ++i) {
    const ExtComplex z = gen.complex(2);
    const auto lhs = m12.apply(z), rhs = m1.apply(m2.apply(z));
    if (lhs.is_infinite() || rhs.is_infinite()) continue;
    EXPECT_LE(std::abs(lhs.value() - rhs.value()), 1e-10 * std::max(1.0, std::abs(rhs.value())));
  }
  EXPECT_LE(compose(m1, MobiusMap::identity()).distance(m1), 1e-15);
}

TEST(Mobius, TraceOfProduct) {
  const cplx w(0.7, -0.2), a(1.3, 0.4);
  const auto t = solve_triple(w, a);
  const auto& b = t.beta;
  EXPECT_NEAR(std::abs(t.gamma().trace() - (b.a() + b.c() * w + b.d())), 0.0, 1e-12);
}

TEST(Parabolic, Classification) {
  EXPECT_FALSE(is_parabolic(MobiusMap::identity()));
  EXPECT_TRUE(is_parabolic(MobiusMap::translation({1, 1})));
  const MobiusMap p(2, 1, -1, 0), h(3, 0, 0, 1.0 / 3.0);
  EXPECT_TRUE(is_parabolic(p));
  EXPECT_FALSE(is_parabolic(h));
  EXPECT_EQ(is_parabolic(p), parabolic_by_eigen(p));
  EXPECT_EQ(is_parabolic(h), parabolic_by_eigen(h));
  props::Gen gen(23);
  for (int i = 0; i < 50; ++i) {
    const auto t = solve_triple(gen.nonzero_complex(3), gen.complex(3));
    EXPECT_TRUE(parabolic_by_eigen(t.beta));
    EXPECT_TRUE(parabolic_by_eigen(t.gamma()));
  }
}

TEST(FixedPoint, Examples) {
  EXPECT_TRUE(fixed_point(MobiusMap::translation({1, 2})).is_infinite());
  EXPECT_THROW(fixed_point(MobiusMap(3, 0, 0, 1.0 / 3.0)), ClassificationError);
  const cplx w(2, 1), a(0.5, -1);
  const auto t = solve_triple(w, a);
  const cplx xb = w * (t.beta.d() - t.beta.a()) / 8.0;
  EXPECT_NEAR(std::abs(fixed_point(t.beta).value() - xb), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(fixed_point(t.gamma()).value() - (xb + w / 2.0)), 0.0, 1e-12);
  for (const auto& m : {t.beta, t.gamma()}) {
    const auto p = fixed_point(m);
    EXPECT_TRUE(near(m.apply(p), p, 1e-10));
  }
}

TEST(SolveTriple, Examples) {
  const auto t = solve_triple(1.0, 1.0);
  EXPECT_LE(t.beta.distance(MobiusMap(1, 0, -4, 1)), 1e-15);
  EXPECT_NEAR(std::abs(t.gamma().trace() + 2.0), 0.0, 1e-15);
  const auto u = solve_triple({0, 2}, {1, 1});
  EXPECT_TRUE(is_parabolic(u.beta));
  EXPECT_TRUE(is_parabolic(u.gamma()));
  EXPECT_THROW(solve_triple(0.0, 1.0), ArgumentError);
}

TEST(SolveTriple, RandomProperties) {
  props::Gen gen(24);
  for (int i = 0; i < 100; ++i) {
    const cplx w = gen.nonzero_complex(3), a = gen.complex(3);
    const auto t = solve_triple(w, a);
    EXPECT_NEAR(std::abs(t.beta.determinant() - 1.0), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(t.beta.trace() - 2.0), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(t.beta.c() + 4.0 / w), 0.0, 1e-12 * std::max(1.0, std::abs(4.0 / w)));
    EXPECT_NEAR(std::abs(t.gamma().trace() + 2.0), 0.0, 1e-12);
    const cplx off = fixed_point(t.gamma()).value() - fixed_point(t.beta).value();
    EXPECT_NEAR(std::abs(off - w / 2.0), 0.0, 1e-12 * std::max(1.0, std::abs(w)));
  }
}

TEST(InvariantCircle, ImagesOfSpecialPoints) {
  const cplx w(1.5, 0.5), a(0.3, 0.8);
  const auto t = solve_triple(w, a);
  const auto line = invariant_circle(t);
  const cplx d = t.beta.d(), aa = t.beta.a();
  const cplx xb = w * (d - aa) / 8.0, xg = xb + w / 2.0;
  const auto img = t.beta.apply(xg);
  EXPECT_NEAR(std::abs(img.value() - (xb - w / 2.0)), 0.0, 1e-12);
  EXPECT_LE(line.distance(img), 1e-12);
  const auto inf_img = t.beta.apply(ExtComplex::infinity());
  EXPECT_NEAR(std::abs(inf_img.value() + w * aa / 4.0), 0.0, 1e-12);
  EXPECT_LE(line.distance(inf_img), 1e-12);
  EXPECT_NEAR(line.parameter(inf_img.value()), -0.25, 1e-12);
}

TEST(InvariantCircle, GeneratorsPreserveLine) {
  props::Gen gen(25);
  for (int trial = 0; trial < 50; ++trial) {
    const auto t = solve_triple(gen.nonzero_complex(2, 0.3), gen.complex(2));
    const auto line = invariant_circle(t);
    for (int s = 0; s < 100; ++s) {
      const cplx p = line.base + gen.uniform(-3, 3) * line.direction;
      EXPECT_LE(line.distance(t.alpha().apply(p)), 1e-9);
      const auto q = t.beta.apply(p);
      if (!q.is_infinite()) {
        EXPECT_LE(line.distance(q), 1e-9 * std::max(1.0, std::abs(q.value())));
      }
    }
  }
}

TEST(InvariantCircle, DegenerateBranch) {
  const auto t = degenerate_triple({1, 0}, {0.3, 0.2});
  EXPECT_THROW(invariant_circle(t), DegenerateBranchError);
  for (const auto& m : {t.alpha(), t.beta, t.gamma()}) EXPECT_TRUE(fixed_point(m).is_infinite());
}

TEST(BoundaryCircle, CircleForm) {
  const auto c = BoundaryCircle::circle({1, 1}, 2.0);
  EXPECT_NEAR(c.distance(cplx(3, 1)), 0.0, 1e-15);
  EXPECT_NEAR(c.distance(cplx(1, 1)), 2.0, 1e-15);
  EXPECT_THROW(BoundaryCircle::circle(0.0, 0.0), ArgumentError);
  EXPECT_THROW(BoundaryCircle::line(0.0, 0.0), ArgumentError);
}

TEST(OrbitSample, InvarianceAndInfinity) {
  const auto t = solve_triple(1.0, 1.0);
  const auto line = invariant_circle(t);
  const auto on = orbit_limit_sample(t, 4, {line.base + 0.3 * line.direction, line.base - 1.7 * line.direction});
  for (const auto& lv : on.levels) EXPECT_LE(lv.max_distance, 1e-9);
  const auto from_inf = orbit_limit_sample(t, 1, {ExtComplex::infinity()});
  bool found = false;
  for (const auto& p : from_inf.points) {
    if (!p.is_infinite() && std::abs(p.value() - (-1.0 * 1.0 / 4.0)) < 1e-12) found = true;
  }
  EXPECT_TRUE(found);
  EXPECT_THROW(orbit_limit_sample(t, 0, {0.0}), ArgumentError);
  EXPECT_THROW(orbit_limit_sample(t, 13, {0.0}), ArgumentError);
}

TEST(OrbitSample, DecayTowardLimitSet) {
  const auto t = solve_triple(1.0, 1.0);
  const auto s = orbit_limit_sample(t, 8, {cplx(0, 1)});
  ASSERT_EQ(s.levels.size(), 8u);
  for (std::size_t k = 1; k < s.levels.size(); ++k) {
    EXPECT_LE(s.levels[k].median_distance, s.levels[k - 1].median_distance + 1e-15) << "length " << k + 1;
  }
  // Recorded: median at length 8 is below 10% of the length-4 value.
  EXPECT_LT(s.levels[7].median_distance, 0.1 * s.levels[3].median_distance);
}
