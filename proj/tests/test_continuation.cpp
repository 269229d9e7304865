#include <gtest/gtest.h>

#include "coulomb/continuation.hpp"

using namespace coulomb;

namespace {

StepPolicy short_run(int points) {
  StepPolicy p;
  p.max_points = points;
  return p;
}

double max_abs_z(const ProblemSpec& spec, const BranchPoint& p) {
  const Eigen::VectorXd u = ReducedLayout(spec.n, spec.family).lift(p.x());
  double z = 0.0;
  for (int j = 0; j < spec.n; ++j) z = std::max(z, std::abs(u(3 * j + 2)));
  return z;
}

}  // namespace

TEST(Seed, EightFour) {
  const auto spec = ProblemSpec::make(8, 4, Family::One);
  const BranchPoint seed = branch_seed(spec, Direction::Plus);
  const ReducedLayout layout(8, Family::One);
  EXPECT_EQ(seed.mu(), s_value(8, 4));
  EXPECT_EQ(seed.x(), layout.project(polygon(8, 0.0).u));
  EXPECT_LE(reduced_map(layout, seed.x(), seed.mu()).lpNorm<Eigen::Infinity>(), 1e-13);
  EXPECT_TRUE(reduced_map(layout, layout.restrict(polygon_enclosure(8)), seed.mu()).contains_zero());
  EXPECT_NEAR(seed.tangent.norm(), 1.0, 1e-12);
  EXPECT_EQ(seed.tangent(seed.tangent.size() - 1), 0.0);
}

TEST(Seed, TangentSpansTheJacobianKernel) {
  for (int n = 4; n <= 9; ++n)
    for (int k = 2; 2 * k <= n; ++k)
      for (Family f : {Family::One, Family::Two}) {
        if (f == Family::Two && 2 * k == n) continue;
        const auto spec = ProblemSpec::make(n, k, f);
        const BranchPoint seed = branch_seed(spec, Direction::Plus);
        const Eigen::MatrixXd j = extended_jacobian(ReducedLayout(n, f), seed.U);
        EXPECT_LE((j * seed.tangent).lpNorm<Eigen::Infinity>(), 1e-10) << n << " " << k;
        EXPECT_EQ(seed.tangent(seed.tangent.size() - 1), 0.0);
      }
}

TEST(Seed, DirectionsAreOpposite) {
  const auto spec = ProblemSpec::make(6, 3, Family::One);
  EXPECT_EQ(branch_seed(spec, Direction::Plus).tangent, -branch_seed(spec, Direction::Minus).tangent);
}

TEST(Seed, SecondFamilyHalfModeHasNoKernel) {
  EXPECT_THROW(branch_seed(ProblemSpec::make(8, 4, Family::Two), Direction::Plus), SymmetryError);
  EXPECT_THROW(branch_seed(ProblemSpec::make(6, 3, Family::Two), Direction::Plus), SymmetryError);
  EXPECT_NO_THROW(branch_seed(ProblemSpec::make(7, 3, Family::Two), Direction::Plus));
}

TEST(Tangent, OrientationAndResidual) {
  const auto spec = ProblemSpec::make(5, 2, Family::One);
  const Branch b = trace_branch(spec, Direction::Plus, short_run(20));
  const ReducedLayout layout(5, Family::One);
  for (std::size_t i = 1; i < b.points.size(); ++i) {
    const BranchPoint& p = b.points[i];
    EXPECT_NEAR(p.tangent.norm(), 1.0, 1e-12);
    EXPECT_GT(p.tangent.dot(b.points[i - 1].tangent), 0.0);
    EXPECT_LE((extended_jacobian(layout, p.U) * p.tangent).lpNorm<Eigen::Infinity>(), 1e-10);
    const Eigen::VectorXd flipped = tangent_at(spec, p.U, -p.tangent);
    EXPECT_LT(flipped.dot(p.tangent), 0.0);
  }
}

TEST(Tangent, RankDeficientThrows) {
  const auto spec = ProblemSpec::make(6, 2, Family::One);
  const BranchPoint seed = branch_seed(spec, Direction::Plus);
  EXPECT_THROW(tangent_at(spec, seed.U, seed.tangent), BifurcationDetected);
}

TEST(PredictCorrect, HyperplaneAndCorrector) {
  const auto spec = ProblemSpec::make(5, 2, Family::One);
  const BranchPoint seed = branch_seed(spec, Direction::Plus);
  const BranchPoint p1 = predict_correct(spec, seed, 1e-4);
  const Eigen::VectorXd predictor = seed.U + 1e-4 * seed.tangent;
  EXPECT_LE(std::abs((p1.U - predictor).dot(seed.tangent)), 1e-12);
  const ReducedLayout layout(5, Family::One);
  EXPECT_LE(reduced_map(layout, p1.x(), p1.mu()).lpNorm<Eigen::Infinity>(), 1e-12);
  EXPECT_GT(max_abs_z(spec, p1), 1e-6);
  EXPECT_EQ(p1.step, 1e-4);
  EXPECT_THROW(predict_correct(spec, seed, 0.0), DomainError);
}

TEST(PredictCorrect, StepHalvingConsistency) {
  const auto spec = ProblemSpec::make(5, 2, Family::One);
  const Branch b = trace_branch(spec, Direction::Plus, short_run(10));
  const BranchPoint& from = b.points.back();
  for (double ds : {4e-3, 2e-3, 1e-3}) {
    const BranchPoint whole = predict_correct(spec, from, ds);
    const BranchPoint half = predict_correct(spec, predict_correct(spec, from, ds / 2), ds / 2);
    EXPECT_LE((whole.U - half.U).lpNorm<Eigen::Infinity>(), 10.0 * ds * ds) << ds;
  }
}

TEST(PredictCorrect, DivergenceIsRejected) {
  const auto spec = ProblemSpec::make(5, 2, Family::One);
  BranchPoint seed = branch_seed(spec, Direction::Plus);
  StepPolicy p;
  p.newton_max_iter = 0;
  EXPECT_THROW(predict_correct(spec, seed, 1e-2, p), StepRejected);
}

TEST(Certify, PolygonAtGenericMu) {
  for (int n : {4, 5, 8})
    for (Family f : {Family::One, Family::Two}) {
      if (f == Family::Two && n == 4) continue;
      const auto spec = ProblemSpec::make(n, 2, f);
      BranchPoint p = branch_seed(spec, Direction::Plus);
      p.U(p.U.size() - 1) = 0.5 * (s_value(n, 1) + s_value(n, 2));
      p = certify_point(p, spec);
      ASSERT_TRUE(p.certified()) << p.cert->diagnostics;
      EXPECT_LE(*p.cert->r0, 1e-10);
    }
}

TEST(Certify, FailsAtBifurcationValue) {
  const auto spec = ProblemSpec::make(8, 4, Family::One);
  const BranchPoint p = certify_point(branch_seed(spec, Direction::Plus), spec);
  ASSERT_TRUE(p.cert);
  EXPECT_FALSE(p.cert->success);
  EXPECT_EQ(p.cert->diagnostics, diagnostics::kZTooLarge);
}

TEST(Certify, EightFourBranchRadii) {
  const auto spec = ProblemSpec::make(8, 4, Family::One);
  Branch b = trace_branch(spec, Direction::Plus, short_run(40));
  certify_branch(b, 2);
  int certified = 0;
  for (std::size_t i = 1; i < b.points.size(); ++i) {
    const BranchPoint& p = b.points[i];
    if (!p.certified()) continue;
    ++certified;
    EXPECT_LT(*p.cert->r0, 1e-6);
    EXPECT_TRUE(radii_polynomial_negative(p.cert->Y, p.cert->Z, *p.cert->r0, p.cert->r_star));
    EXPECT_LE(polygon_group_defect(spec, p), 2.0 * *p.cert->r0);
  }
  EXPECT_GE(certified, 35);
}

TEST(Certify, ThreadCountDoesNotChangeResults) {
  const auto spec = ProblemSpec::make(6, 2, Family::Two);
  Branch a = trace_branch(spec, Direction::Plus, short_run(12));
  Branch b = a;
  certify_branch(a, 1);
  certify_branch(b, 3);
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    ASSERT_EQ(a.points[i].certified(), b.points[i].certified());
    EXPECT_EQ(a.points[i].flags, b.points[i].flags);
    if (a.points[i].certified()) {
      EXPECT_EQ(a.points[i].cert->Y, b.points[i].cert->Y);
      EXPECT_EQ(*a.points[i].cert->r0, *b.points[i].cert->r0);
    }
  }
}

TEST(Certify, OverlapFlagsMatchBallDistances) {
  const auto spec = ProblemSpec::make(5, 2, Family::One);
  Branch b = trace_branch(spec, Direction::Plus, short_run(25));
  certify_branch(b);
  for (std::size_t i = 1; i < b.points.size(); ++i) {
    const auto& p = b.points[i];
    const auto& q = b.points[i - 1];
    bool overlap = false;
    if (p.certified() && q.certified())
      overlap = (p.U - q.U).lpNorm<Eigen::Infinity>() <= *p.cert->r0 + *q.cert->r0;
    EXPECT_EQ((p.flags & kFlagOverlap) != 0, overlap) << i;
  }
}

TEST(Trace, TerminationReasons) {
  const auto spec = ProblemSpec::make(5, 2, Family::One);
  const Branch one = trace_branch(spec, Direction::Plus, short_run(1));
  EXPECT_EQ(one.points.size(), 1u);
  EXPECT_EQ(one.termination, Termination::MaxPoints);

  StepPolicy bound = short_run(500);
  bound.mu_bound_factor = s_value(5, 2) / 5.0 + 1e-3;
  const Branch b = trace_branch(spec, Direction::Plus, bound);
  if (b.points.back().mu() > s_value(5, 2)) {
    EXPECT_EQ(b.termination, Termination::ParameterBound);
  }

  StepPolicy underflow = short_run(10);
  underflow.newton_max_iter = 0;
  underflow.min_step = 1e-5;
  EXPECT_EQ(trace_branch(spec, Direction::Plus, underflow).termination, Termination::StepUnderflow);
}

TEST(Trace, StepPolicy) {
  const auto spec = ProblemSpec::make(8, 4, Family::One);
  const Branch b = trace_branch(spec, Direction::Plus, short_run(30));
  ASSERT_GE(b.points.size(), 3u);
  EXPECT_EQ(b.points[1].step, 1e-4);
  EXPECT_EQ(b.points[2].step, 1e-3);
  for (const auto& p : b.points) EXPECT_LE(p.step, 0.1);
}

TEST(Trace, ReflectionSymmetryIsExact) {
  const auto spec = ProblemSpec::make(7, 2, Family::Two);
  const ReducedLayout layout(7, Family::Two);
  const Branch b = trace_branch(spec, Direction::Minus, short_run(15));
  for (const auto& p : b.points) EXPECT_EQ(layout.symmetry_defect(layout.lift(p.x())), 0.0);
}

TEST(Trace, MinusBranchIsTheZMirror) {
  for (const Family f : {Family::One, Family::Two}) {
    const auto spec = ProblemSpec::make(7, 3, f);
    const ReducedLayout layout(7, f);
    const Branch a = trace_branch(spec, Direction::Plus, short_run(40));
    const Branch b = trace_branch(spec, Direction::Minus, short_run(40));
    ASSERT_EQ(a.points.size(), b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i) {
      Eigen::VectorXd mirrored = layout.lift(a.points[i].x());
      for (int j = 0; j < 7; ++j) mirrored(3 * j + 2) = -mirrored(3 * j + 2);
      EXPECT_EQ(layout.lift(b.points[i].x()), mirrored) << i;
      EXPECT_EQ(a.points[i].mu(), b.points[i].mu());
    }
  }
}

TEST(Secondary, ManufacturedPitchfork) {
  // F(x, mu) = x^3 - mu x along the trivial branch x = 0.
  std::vector<Eigen::VectorXd> U, T;
  for (int i = 0; i <= 20; ++i) {
    U.push_back(Eigen::Vector2d(0.0, -1.0 + 0.1 * i + 0.05));
    T.push_back(Eigen::Vector2d(0.0, 1.0));
  }
  const auto jac = [](const Eigen::VectorXd& u) {
    Eigen::MatrixXd j(1, 2);
    j << 3 * u(0) * u(0) - u(1), -u(0);
    return j;
  };
  const auto flags = detect_secondary(U, T, jac);
  ASSERT_EQ(flags.size(), 1u);
  EXPECT_LT(U[flags[0].index](1), 0.0);
  EXPECT_GT(U[flags[0].index + 1](1), 0.0);
}

TEST(Secondary, NoneNearSeed) {
  const auto spec = ProblemSpec::make(5, 2, Family::One);
  Branch b = trace_branch(spec, Direction::Plus, short_run(15));
  certify_branch(b);
  EXPECT_TRUE(detect_secondary(b).empty());
}

TEST(Secondary, FiveTwoMainBranch) {
  const auto spec = ProblemSpec::make(5, 2, Family::One);
  Branch b = trace_branch(spec, Direction::Plus);
  const auto flags = detect_secondary(b);
  EXPECT_GE(flags.size(), 1u);
  for (const auto& f : flags) EXPECT_TRUE(b.points[f.index + 1].flags & kFlagSecondary);
  const BranchPoint seed = secondary_seed(b, flags.front());
  EXPECT_NEAR(seed.tangent.norm(), 1.0, 1e-12);
  EXPECT_LT(std::abs(seed.tangent.dot(b.points[flags.front().index + 1].tangent)), 0.5);
}

TEST(Enums, RoundTrip) {
  for (auto t : {Termination::MaxPoints, Termination::CollisionProximity, Termination::StepUnderflow,
                 Termination::ParameterBound})
    EXPECT_EQ(termination_from_string(to_string(t)), t);
  EXPECT_EQ(direction_from_string("minus"), Direction::Minus);
  EXPECT_THROW(direction_from_string("up"), DomainError);
}
