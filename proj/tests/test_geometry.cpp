#include <gtest/gtest.h>

#include <cmath>

#include "test_support.hpp"
#include "willmore/geometry.hpp"

using namespace willmore;
using willmore::testing::Sampler;
using willmore::testing::max_entry_diff;

TEST(EigSym2, DiagonalAndOffDiagonal) {
  auto e = eig_sym2(SymMat2::diag(1, -2));
  EXPECT_DOUBLE_EQ(e.tau1, 1);
  EXPECT_DOUBLE_EQ(e.tau2, -2);
  e = eig_sym2({0, 1, 0});
  EXPECT_DOUBLE_EQ(e.tau1, 1);
  EXPECT_DOUBLE_EQ(e.tau2, -1);
  e = eig_sym2(SymMat2::diag(2, 2));
  EXPECT_DOUBLE_EQ(e.tau1, 2);
  EXPECT_DOUBLE_EQ(e.tau2, 2);
}

TEST(EigSym2, TraceAndDeterminantRandom) {
  Sampler s(11);
  for (int k = 0; k < 20000; ++k) {
    const SymMat2 m = s.matrix(5);
    const auto e = eig_sym2(m);
    ASSERT_GE(e.tau1, e.tau2);
    const double scale = std::max(1.0, m.frobenius_sq());
    ASSERT_NEAR(e.tau1 + e.tau2, m.trace(), 1e-12 * std::max(1.0, m.frobenius()));
    ASSERT_NEAR(e.tau1 * e.tau2, m.det(), 1e-12 * scale);
  }
}

TEST(EigSym2, MajorEigenvector) {
  Sampler s(12);
  for (int k = 0; k < 1000; ++k) {
    const SymMat2 m = s.matrix(3);
    const Vec2 e = eigvec_major(m);
    const Vec2 me = m.apply(e);
    const double t = eig_sym2(m).tau1;
    ASSERT_NEAR(me.x, t * e.x, 1e-12 * 10);
    ASSERT_NEAR(me.y, t * e.y, 1e-12 * 10);
  }
}

TEST(Rho0, Examples) {
  EXPECT_DOUBLE_EQ(rho0(SymMat2::diag(1, -2)), 3);
  EXPECT_DOUBLE_EQ(rho0({0, 1, 0}), 2);
  EXPECT_DOUBLE_EQ(rho0({}), 0);
}

TEST(Rho0, FrobeniusBoundsOnManyMatrices) {
  Sampler s(1);
  for (int k = 0; k < 100000; ++k) {
    const SymMat2 m = s.matrix(s.log_uniform(1e-3, 1e3));
    const double r = rho0(m), f = m.frobenius();
    ASSERT_LE(f, r + 1e-12 * f);
    ASSERT_LE(r, 2 * f + 1e-12 * f);
  }
}

TEST(Rho0, MatchesEigenvalueSumAndIsHomogeneous) {
  Sampler s(2);
  for (int k = 0; k < 10000; ++k) {
    const SymMat2 m = s.matrix(4);
    const auto e = eig_sym2(m);
    ASSERT_NEAR(rho0(m), std::fabs(e.tau1) + std::fabs(e.tau2), 1e-12 * std::max(1.0, m.frobenius()));
    const double t = s.uniform(0, 7);
    ASSERT_NEAR(rho0(t * m), t * rho0(m), 1e-12 * std::max(1.0, t * rho0(m)));
    ASSERT_NEAR(op_norm(m), std::max(std::fabs(e.tau1), std::fabs(e.tau2)), 1e-12 * std::max(1.0, m.frobenius()));
  }
}

TEST(Normal, Examples) {
  auto n = normal({0, 0});
  EXPECT_EQ(n.n1, 0);
  EXPECT_EQ(n.n2, 0);
  EXPECT_EQ(n.n3, -1);
  n = normal({1, 0});
  EXPECT_NEAR(n.n1, 0.70711, 1e-5);
  EXPECT_NEAR(n.n3, -0.70711, 1e-5);
  n = normal({3, 4});
  const double r = std::sqrt(26.0);
  EXPECT_NEAR(n.n1, 3 / r, 1e-15);
  EXPECT_NEAR(n.n2, 4 / r, 1e-15);
  EXPECT_NEAR(n.n3, -1 / r, 1e-15);
}

TEST(Normal, UnitAndPointingDown) {
  Sampler s(3);
  for (int k = 0; k < 10000; ++k) {
    const auto n = normal(s.tilt(100));
    ASSERT_NEAR(n.n1 * n.n1 + n.n2 * n.n2 + n.n3 * n.n3, 1.0, 1e-12);
    ASSERT_LT(n.n3, 0.0);
  }
}

TEST(ShapeOperator, Examples) {
  const SymMat2 xi{0.3, -1.2, 2.5};
  const SymMat2 s0 = shape_operator({0, 0}, xi);
  EXPECT_EQ(s0.a11, xi.a11);
  EXPECT_EQ(s0.a12, xi.a12);
  EXPECT_EQ(s0.a22, xi.a22);
  SymMat2 s = shape_operator({1, 0}, SymMat2::diag(1, 1));
  EXPECT_NEAR(s.a11, std::pow(2.0, -1.5), 1e-15);
  EXPECT_NEAR(s.a12, 0.0, 1e-15);
  EXPECT_NEAR(s.a22, std::pow(2.0, -0.5), 1e-15);
  s = shape_operator({0, 2}, SymMat2::diag(1, 0));
  EXPECT_NEAR(s.a11, 1 / std::sqrt(5.0), 1e-15);
  EXPECT_NEAR(s.a22, 0.0, 1e-15);
}

// Independent route: principal curvatures of a graph are the eigenvalues of g^{-1} II.
TEST(ShapeOperator, EigenvaluesMatchWeingartenMap) {
  Sampler s(4);
  for (int k = 0; k < 10000; ++k) {
    const Tilt v = s.tilt(3);
    const SymMat2 xi = s.matrix(3);
    const double w = std::sqrt(1 + v.norm_sq());
    const SymMat2 g = metric(v);
    const double dg = g.det();
    // g^{-1} II, a non-symmetric matrix
    const double gi11 = g.a22 / dg, gi12 = -g.a12 / dg, gi22 = g.a11 / dg;
    const double m11 = (gi11 * xi.a11 + gi12 * xi.a12) / w;
    const double m12 = (gi11 * xi.a12 + gi12 * xi.a22) / w;
    const double m21 = (gi12 * xi.a11 + gi22 * xi.a12) / w;
    const double m22 = (gi12 * xi.a12 + gi22 * xi.a22) / w;
    const SymMat2 S = shape_operator(v, xi);
    ASSERT_NEAR(S.trace(), m11 + m22, 1e-12 * std::max(1.0, xi.frobenius()));
    ASSERT_NEAR(S.det(), m11 * m22 - m12 * m21, 1e-12 * std::max(1.0, xi.frobenius_sq()));
  }
}

TEST(ShapeOperator, NormBoundLinearityAndInverse) {
  Sampler s(5);
  for (int k = 0; k < 10000; ++k) {
    const Tilt v = s.tilt(s.log_uniform(1e-8, 30));
    const SymMat2 x1 = s.matrix(4), x2 = s.matrix(4);
    const double a = s.uniform(-3, 3), b = s.uniform(-3, 3);
    const SymMat2 S1 = shape_operator(v, x1);
    ASSERT_LE(S1.frobenius_sq(), x1.frobenius_sq() / (1 + v.norm_sq()) * (1 + 1e-12) + 1e-300);
    const SymMat2 lhs = shape_operator(v, a * x1 + b * x2);
    const SymMat2 rhs = a * S1 + b * shape_operator(v, x2);
    ASSERT_LE(max_entry_diff(lhs, rhs), 1e-12 * 30);
    ASSERT_LE(max_entry_diff(hessian_from_shape(v, S1), x1), 1e-12 * std::max(1.0, v.norm_sq()) * 10);
  }
}

TEST(ShapeOperator, ContinuousAtZeroTilt) {
  const SymMat2 xi{1.0, 0.5, -2.0};
  const SymMat2 a = shape_operator({1e-300, 0}, xi);
  const SymMat2 b = shape_operator({1e-9, -1e-9}, xi);
  EXPECT_LE(max_entry_diff(a, xi), 1e-15);
  EXPECT_LE(max_entry_diff(b, xi), 1e-15);
}

TEST(TurningAngle, Examples) {
  EXPECT_EQ(turning_angle({0.3, -2}, {0.3, -2}), 0.0);
  EXPECT_NEAR(turning_angle({0, 0}, {0, 1}), M_PI / 4, 1e-15);
  EXPECT_NEAR(turning_angle({0, 1}, {0, -1}), M_PI / 2, 1e-15);
}

TEST(TurningAngle, SymmetricAndPositiveOffDiagonal) {
  Sampler s(6);
  for (int k = 0; k < 10000; ++k) {
    const Tilt a = s.tilt(5), b = s.tilt(5);
    const double t = turning_angle(a, b);
    ASSERT_EQ(t, turning_angle(b, a));
    ASSERT_GE(t, 0.0);
    ASSERT_LE(t, M_PI);
    ASSERT_GT(t, 0.0);
    // arccos of the clamped dot product, the textbook form
    const auto na = normal(a), nb = normal(b);
    const double c = std::clamp(na.n1 * nb.n1 + na.n2 * nb.n2 + na.n3 * nb.n3, -1.0, 1.0);
    ASSERT_NEAR(t, std::acos(c), 1e-7);
  }
}
