#include <gtest/gtest.h>

#include <random>

#include "coulomb/interval_linalg.hpp"
#include "oracle.hpp"

using namespace coulomb;

TEST(IntervalLinalg, NormInfOfVector) {
  const IntervalVector v{Interval(1), Interval(1), Interval(-3), Interval(-3)};
  EXPECT_TRUE(norm_inf(v).contains(3.0));
}

TEST(IntervalLinalg, InducedNormOfIdentity) {
  EXPECT_TRUE(induced_norm_inf(IntervalMatrix::identity(2)).contains(1.0));
}

TEST(IntervalLinalg, InducedNormUsesMagnitudes) {
  IntervalMatrix m(2, 2);
  m(0, 1) = Interval(-2, 2);
  EXPECT_GE(induced_norm_inf(m).hi(), 2.0);
}

TEST(IntervalLinalg, IdentityTimesVector) {
  const IntervalVector v{Interval(1, 2), Interval(-1), Interval(0.1)};
  const IntervalVector r = IntervalMatrix::identity(3) * v;
  for (std::size_t i = 0; i < 3; ++i) EXPECT_TRUE(r[i].contains(v[i]));
}

TEST(IntervalLinalg, DifferenceOfEqualMatricesContainsZero) {
  const IntervalMatrix a(Eigen::MatrixXd::Random(3, 3));
  const IntervalVector v(Eigen::VectorXd::Random(3));
  EXPECT_TRUE(((a - a) * v).contains_zero());
}

TEST(IntervalLinalg, PointProductAgainstExtendedPrecision) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> d(-10, 10);
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::MatrixXd a(3, 3);
    Eigen::VectorXd x(3);
    for (int i = 0; i < 3; ++i) {
      x(i) = d(rng);
      for (int j = 0; j < 3; ++j) a(i, j) = d(rng);
    }
    const IntervalVector r = IntervalMatrix(a) * IntervalVector(x);
    const IntervalVector r2 = a * IntervalVector(x);
    for (int i = 0; i < 3; ++i) {
      oracle::Big s;
      for (int j = 0; j < 3; ++j) s = s + oracle::Big(a(i, j)) * oracle::Big(x(j));
      EXPECT_TRUE(s.within(r[i].lo(), r[i].hi()));
      EXPECT_TRUE(s.within(r2[i].lo(), r2[i].hi()));
    }
  }
}

TEST(IntervalLinalg, ShapeMismatchThrows) {
  EXPECT_THROW(IntervalMatrix::identity(2) * IntervalVector(3), ShapeError);
  EXPECT_THROW(IntervalVector(2) + IntervalVector(3), ShapeError);
  EXPECT_THROW(IntervalMatrix(2, 3) * IntervalMatrix(2, 3), ShapeError);
  EXPECT_THROW(IntervalMatrix(2, 2) - IntervalMatrix(3, 2), ShapeError);
  EXPECT_THROW(mul_midrad(Eigen::MatrixXd::Zero(2, 3), IntervalMatrix(2, 2)), ShapeError);
}

TEST(IntervalLinalg, MidradProductEnclosesEntrywiseSelections) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> d(-1, 1);
  const int n = 50;
  Eigen::MatrixXd a(n, n), bmid(n, n);
  IntervalMatrix b(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      a(i, j) = d(rng);
      bmid(i, j) = d(rng);
      const double r = std::abs(d(rng)) * 1e-6;
      b(i, j) = Interval(bmid(i, j) - r, bmid(i, j) + r);
    }
  const IntervalMatrix p = mul_midrad(a, b);
  const IntervalMatrix q = a * b;
  // Exact product at the centre selection, entry (i, j).
  for (int i = 0; i < n; i += 7)
    for (int j = 0; j < n; j += 5) {
      oracle::Big s;
      for (int k = 0; k < n; ++k) s = s + oracle::Big(a(i, k)) * oracle::Big(b(k, j).lo());
      EXPECT_TRUE(s.within(p(i, j).lo(), p(i, j).hi()));
      EXPECT_TRUE(s.within(q(i, j).lo(), q(i, j).hi()));
    }
}

TEST(IntervalLinalg, BallAndContains) {
  Eigen::VectorXd c(2);
  c << 1.0, -2.0;
  const IntervalVector b = IntervalVector::ball(c, 0.5);
  EXPECT_TRUE(b.contains(c));
  EXPECT_TRUE(b[0].contains(1.5));
  EXPECT_TRUE(b[1].contains(-2.5));
  EXPECT_EQ(b.mid(), c);
}
