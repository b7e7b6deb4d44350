#include <gtest/gtest.h>

#include <cmath>

#include "ballcrit/solvers.hpp"
#include "oracles.hpp"

using namespace ballcrit;

namespace {

GridProblem quartic(std::size_t m, std::size_t n, double lambda) {
  return GridProblem(OperatorA(GridShape(m, n)), Nonlinearity(PowerLaw{1.0, 4.0, 0.0}), lambda);
}

GridVector vec(GridShape s, std::initializer_list<double> xs) {
  GridVector v(s);
  Eigen::Index k = 0;
  for (double x : xs) v.values[k++] = x;
  return v;
}

}  // namespace

TEST(Classify, OneByOne) {
  const GridProblem p = quartic(1, 1, 0.5);
  EXPECT_EQ(classify(p, Eigen::VectorXd::Zero(1)), PointClass::local_min);
  EXPECT_EQ(classify(p, Eigen::VectorXd::Constant(1, std::sqrt(2.0))), PointClass::local_max);
  // f'' vanishes where 4 = 6 x^2
  EXPECT_EQ(classify(p, Eigen::VectorXd::Constant(1, std::sqrt(2.0 / 3.0))), PointClass::degenerate);
}

TEST(Classify, TwoByOneSaddleAgainstOracle) {
  const GridProblem p = quartic(2, 1, 0.5);
  const auto pts = oracle::enumerate_quartic(oracle::laplacian(2, 1), 0.5, 3.0, 31);
  for (const auto& c : pts) {
    const PointClass k = classify(p, c.x);
    if (c.negative == 0 && c.positive == 2) {
      EXPECT_EQ(k, PointClass::local_min);
    } else if (c.negative == 2) {
      EXPECT_EQ(k, PointClass::local_max);
    } else if (c.negative == 1 && c.positive == 1) {
      EXPECT_EQ(k, PointClass::saddle);
    }
  }
}

TEST(BallMinimize, InteriorZeroIsCertified) {
  const GridProblem p = quartic(2, 2, 0.5);
  const CriticalPoint cp = ball_minimize(p, 1.0);
  EXPECT_LE(cp.point.norm(), 1e-12);
  EXPECT_TRUE(cp.converged);
  EXPECT_FALSE(cp.on_boundary);
  EXPECT_TRUE(cp.kkt_satisfied);
  EXPECT_EQ(cp.kind, PointKind::ball_min);
  EXPECT_EQ(cp.classification, PointClass::local_min);
}

TEST(BallMinimize, BoundaryMinimizerAboveThreshold) {
  // 1x1, lambda = 5: J = 2x^2 - 5x^4 is minimized on the ball at |x| = 1 with J = -3
  const GridProblem p = quartic(1, 1, 5.0);
  const CriticalPoint cp = ball_minimize(p, 1.0);
  EXPECT_NEAR(std::abs(cp.point.values[0]), 1.0, 1e-12);
  EXPECT_NEAR(cp.value, -3.0, 1e-10);
  EXPECT_TRUE(cp.on_boundary);
  EXPECT_TRUE(cp.kkt_satisfied);
  EXPECT_FALSE(cp.converged);
}

TEST(BallMinimize, RejectsNonPositiveRadius) {
  EXPECT_THROW(ball_minimize(quartic(1, 1, 0.5), 0.0), std::invalid_argument);
  EXPECT_THROW(ball_minimize(quartic(1, 1, 0.5), -1.0), std::invalid_argument);
}

TEST(BallMinimize, TraceStaysInBallAndDescends) {
  const GridProblem p = quartic(3, 3, 2.0);
  std::vector<TraceRecord> recs;
  SolverOptions o;
  o.trace = [&](const TraceRecord& r) { recs.push_back(r); };
  o.starts = 4;
  (void)ball_minimize(p, 0.8, o);
  ASSERT_FALSE(recs.empty());
  for (std::size_t k = 0; k < recs.size(); ++k) {
    EXPECT_LE(recs[k].norm, 0.8 * (1.0 + 1e-12));
    if (k > 0 && recs[k].start == recs[k - 1].start) {
      EXPECT_LE(recs[k].value, recs[k - 1].value + 1e-14);
    }
  }
}

TEST(ConvexSubproblem, SolvesCompanionEquation) {
  const GridProblem p = quartic(3, 2, 0.7);
  const GridVector u = vec(GridShape(3, 2), {0.1, -0.5, 0.3, 0.8, 0.0, -0.2});
  const GridVector v = convex_subproblem(p, u);
  const Eigen::VectorXd rhs = 0.7 * p.f_vector(u.values);
  EXPECT_LE((p.op().apply(v.values) - rhs).norm(), 1e-11 * std::max(1.0, rhs.norm()));
}

TEST(ConvexSubproblem, BudgetExhaustedThrows) {
  const GridProblem p = quartic(8, 8, 0.7);
  GridVector u(GridShape(8, 8));
  u.values.setConstant(0.5);
  EXPECT_THROW(convex_subproblem(p, u, 1e-14, 1), ConvergenceFailure);
}

TEST(StraightPath, Endpoints) {
  const Path path = straight_path(Eigen::Vector2d(0, 0), Eigen::Vector2d(2, 4), 5);
  ASSERT_EQ(path.nodes.size(), 5u);
  EXPECT_EQ(path.nodes.front(), Eigen::VectorXd(Eigen::Vector2d(0, 0)));
  EXPECT_EQ(path.nodes.back(), Eigen::VectorXd(Eigen::Vector2d(2, 4)));
  EXPECT_NEAR((path.nodes[2] - Eigen::Vector2d(1, 2)).norm(), 0.0, 1e-15);
}

TEST(MountainPass, OneByOneFindsRootTwo) {
  const GridProblem p = quartic(1, 1, 0.5);
  const GridShape s(1, 1);
  const CriticalPoint z = mountain_pass(p, vec(s, {0.0}), vec(s, {3.0}));
  EXPECT_NEAR(z.point.values[0], std::sqrt(2.0), 1e-10);
  EXPECT_NEAR(z.value, 2.0, 1e-10);
  EXPECT_TRUE(z.converged);
  EXPECT_EQ(z.kind, PointKind::mountain_pass);
}

TEST(MountainPass, TwoByOneSymmetricValley) {
  const GridProblem p = quartic(2, 1, 0.5);
  const GridShape s(2, 1);
  const Eigen::VectorXd mode = eigenvector_analytic(s, 1, 1);
  const CriticalPoint z = mountain_pass(p, GridVector::zeros(s), GridVector(s, 4.0 * mode));
  EXPECT_NEAR(z.value, 2.25, 1e-8);
  EXPECT_LE(z.residual, 1e-8);
  const auto pts = oracle::enumerate_quartic(oracle::laplacian(2, 1), 0.5, 3.0, 31);
  EXPECT_LE(oracle::distance_to(pts, z.point.values), 1e-6);
}

TEST(MountainPass, EndpointMaximumViolatesGeometry) {
  // convex energy: the path maximum sits at the far endpoint
  const GridProblem p(OperatorA(GridShape(2, 1)), Nonlinearity::zero(), 1.0);
  const GridShape s(2, 1);
  EXPECT_THROW(mountain_pass(p, GridVector::zeros(s), vec(s, {1.0, 1.0})), GeometryViolated);
}

TEST(AntiCoercivity, QuarticYesZeroNo) {
  EXPECT_TRUE(anti_coercivity_check(quartic(2, 2, 0.5), 16, 1).anti_coercive);
  const GridProblem z(OperatorA(GridShape(2, 2)), Nonlinearity::zero(), 1.0);
  EXPECT_FALSE(anti_coercivity_check(z, 16, 1).anti_coercive);
}

TEST(GlobalMaximize, MatchesEnumerationMaximum) {
  for (auto [m, n] : {std::pair<std::size_t, std::size_t>{1, 1}, {2, 1}, {2, 2}}) {
    const GridProblem p = quartic(m, n, 0.5);
    const CriticalPoint g = global_maximize(p);
    const auto pts = oracle::enumerate_quartic(oracle::laplacian(m, n), 0.5, 3.0, m * n > 2 ? 9 : 31);
    double best = -INFINITY;
    for (const auto& c : pts) best = std::max(best, c.value);
    EXPECT_NEAR(g.value, best, 1e-8) << m << "x" << n;
    EXPECT_TRUE(g.converged);
    EXPECT_EQ(g.classification, PointClass::local_max);
  }
}

TEST(GlobalMaximize, ConvexEnergyIsNotAntiCoercive) {
  const GridProblem z(OperatorA(GridShape(2, 2)), Nonlinearity::zero(), 1.0);
  EXPECT_THROW(global_maximize(z), NotAntiCoercive);
}

TEST(MountainGeometry, OneByOneMargin) {
  const GridProblem p = quartic(1, 1, 0.5);
  const GridShape s(1, 1);
  const auto g = mountain_geometry_check(p, 1.0, vec(s, {0.0}), vec(s, {3.0}), 64, 2);
  EXPECT_NEAR(g.margin, 1.5, 1e-3);
  EXPECT_NEAR(g.inf_sphere_estimate, 1.5, 1e-3);
  EXPECT_TRUE(g.positive);
}

TEST(MountainGeometry, TwoByOneAgainstCircleSearch) {
  const GridProblem p = quartic(2, 1, 0.5);
  const GridShape s(2, 1);
  const auto g = mountain_geometry_check(p, 1.0, GridVector::zeros(s), vec(s, {3.0, 3.0}), 256, 3);
  const double oracle_min =
      oracle::circle_min([&](const Eigen::Vector2d& x) { return p.energy(x); }, 1.0);
  EXPECT_NEAR(g.inf_sphere_estimate, oracle_min, 1e-6);
}

TEST(MountainGeometry, ErrorsAndDegenerate) {
  const GridProblem p = quartic(1, 1, 0.5);
  const GridShape s(1, 1);
  EXPECT_THROW(mountain_geometry_check(p, 0.5, vec(s, {1.0}), vec(s, {3.0}), 8), std::invalid_argument);
  EXPECT_THROW(mountain_geometry_check(p, 4.0, vec(s, {0.0}), vec(s, {3.0}), 8), std::invalid_argument);
  const auto d = mountain_geometry_check(p, 1.0, vec(s, {0.0}), vec(s, {3.0}), 0);
  EXPECT_TRUE(d.degenerate);
  EXPECT_EQ(d.margin, 0.0);
}

TEST(Pipeline, TwoByOneThreePoints) {
  const GridProblem p = quartic(2, 1, 0.5);
  const auto k = discrete_constants(p.op(), 1.0);
  const PipelineResult r = three_point_pipeline(p, k);
  ASSERT_TRUE(r.mountain_pass && r.global_max);
  EXPECT_NEAR(r.ball_min.value, 0.0, 1e-6);
  EXPECT_NEAR(r.mountain_pass->value, 2.25, 1e-6);
  EXPECT_NEAR(r.global_max->value, 6.25, 1e-6);
  EXPECT_EQ(r.distinct_count, 3);
  EXPECT_TRUE(r.issues.empty());
  EXPECT_TRUE(r.lambda_admissible);
  ASSERT_TRUE(r.ball_min.certificate);
  EXPECT_EQ(r.ball_min.certificate->verdict, Verdict::certified);
}

TEST(Pipeline, OneByOneIsHonestAboutCoincidence) {
  const GridProblem p = quartic(1, 1, 0.5);
  const PipelineResult r = three_point_pipeline(p, discrete_constants(p.op(), 1.0));
  if (r.distinct_count == 2) {
    EXPECT_TRUE(r.coincidence_note.has_value());
  } else {
    ASSERT_EQ(r.distinct_count, 3);
    EXPECT_LT(r.mountain_pass->point.values[0] * r.global_max->point.values[0], 0.0);
  }
}

TEST(Pipeline, ConvexProblemRecordsGeometryViolation) {
  const GridProblem p(OperatorA(GridShape(2, 2)), Nonlinearity::zero(), 1.0);
  const PipelineResult r = three_point_pipeline(p, discrete_constants(p.op(), 1.0));
  EXPECT_TRUE(r.has_issue("geometry_violated"));
  EXPECT_TRUE(r.has_issue("not_anti_coercive"));
  EXPECT_EQ(r.distinct_count, 1);
}

TEST(Pipeline, DeterministicForSeed) {
  const GridProblem p = quartic(3, 2, 0.4);
  PipelineOptions o;
  o.solver.seed = 17;
  const auto k = discrete_constants(p.op(), 1.0);
  const PipelineResult a = three_point_pipeline(p, k, o), b = three_point_pipeline(p, k, o);
  EXPECT_EQ(a.ball_min.point.values, b.ball_min.point.values);
  ASSERT_EQ(a.mountain_pass.has_value(), b.mountain_pass.has_value());
  if (a.mountain_pass) {
    EXPECT_EQ(a.mountain_pass->point.values, b.mountain_pass->point.values);
  }
  ASSERT_EQ(a.global_max.has_value(), b.global_max.has_value());
  if (a.global_max) {
    EXPECT_EQ(a.global_max->point.values, b.global_max->point.values);
  }
}

TEST(Pipeline, Rho1DefaultsAndOverride) {
  const GridProblem p = quartic(2, 1, 0.5);
  const auto k = discrete_constants(p.op(), 1.0);
  const PipelineResult r = three_point_pipeline(p, k);
  EXPECT_EQ(r.rho1, 1.0);
  EXPECT_TRUE(r.rho1_exceeds_minimizer);
  EXPECT_TRUE(r.rho1_covers_ball);
  PipelineOptions o;
  o.rho1 = 0.5;
  const PipelineResult s = three_point_pipeline(p, k, o);
  EXPECT_EQ(s.rho1, 0.5);
  EXPECT_FALSE(s.rho1_covers_ball);
}
