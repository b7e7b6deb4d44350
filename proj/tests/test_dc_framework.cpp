#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ballcrit/dc_framework.hpp"

using namespace ballcrit;

namespace {

GridProblem quartic(std::size_t m, std::size_t n, double lambda) {
  return GridProblem(OperatorA(GridShape(m, n)), Nonlinearity(PowerLaw{1.0, 4.0, 0.0}), lambda);
}

GridVector scalar(double x) {
  Eigen::VectorXd v(1);
  v << x;
  return GridVector(GridShape(1, 1), v);
}

}  // namespace

TEST(StructureConstants, Validation) {
  EXPECT_NO_THROW(StructureConstants{}.validate());
  EXPECT_THROW((StructureConstants{1.0, 1.0, 1.0, 1.0}.validate()), std::invalid_argument);
  EXPECT_THROW((StructureConstants{2.0, 0.0, 1.0, 1.0}.validate()), std::invalid_argument);
  EXPECT_THROW((StructureConstants{2.0, 1.0, -1.0, 1.0}.validate()), std::invalid_argument);
  EXPECT_THROW((StructureConstants{2.0, 1.0, 1.0, 0.0}.validate()), std::invalid_argument);
}

TEST(StructureConstants, DiscreteUsesSmallestEigenvalue) {
  const auto k = discrete_constants(OperatorA(GridShape(2, 2)), 1.0);
  EXPECT_EQ(k.alpha, 2.0);
  EXPECT_NEAR(k.gamma, 2.0, 1e-14);
  EXPECT_EQ(k.c, 1.0);
}

TEST(LambdaStar, FormulaAndInfinity) {
  EXPECT_DOUBLE_EQ(lambda_star(StructureConstants{2.0, 2.0, 1.0, 1.0}, 4.0), 0.5);
  EXPECT_DOUBLE_EQ(lambda_star(StructureConstants{3.0, 1.0, 0.5, 2.0}, 2.0), 4.0);
  EXPECT_TRUE(std::isinf(lambda_star(StructureConstants{}, 0.0)));
  EXPECT_THROW(lambda_star(StructureConstants{}, -1.0), std::invalid_argument);
}

TEST(BetaSup, ClosedFormQuarticTwoByTwo) {
  const Nonlinearity nl(PowerLaw{1.0, 4.0, 0.0});
  const GridShape s(2, 2);
  const auto k = discrete_constants(OperatorA(s), 1.0);
  ASSERT_TRUE(closed_form_beta_applicable(nl));
  const BetaEstimate b = beta_sup(nl, s, k);
  EXPECT_EQ(b.beta, 4.0);
  EXPECT_EQ(b.method, BetaMethod::closed_form);
  EXPECT_FALSE(b.heuristic);
  // lowest value first, then lexicographic: -rho e1
  EXPECT_EQ(b.maximizer.values, Eigen::Vector4d(-1, 0, 0, 0));

  const LambdaStarResult r = compute_lambda_star(nl, s, k);
  EXPECT_DOUBLE_EQ(r.lambda_star, 0.5);  // alpha_1 = 4 - 4 cos(pi/3) is a few ulps off 2
  EXPECT_FALSE(r.estimate);
}

TEST(BetaSup, MultistartAgreesWithClosedForm) {
  const Nonlinearity nl(PowerLaw{1.0, 4.0, 0.0});
  const GridShape s(2, 2);
  const auto k = discrete_constants(OperatorA(s), 1.0);
  BetaOptions o;
  o.mode = BetaOptions::Mode::multistart;
  o.seed = 9;
  const BetaEstimate b = beta_sup(nl, s, k, o);
  EXPECT_EQ(b.method, BetaMethod::multistart_ascent);
  EXPECT_TRUE(b.heuristic);
  EXPECT_NEAR(b.beta, 4.0, 4e-6);
  EXPECT_LE(b.maximizer.norm(), 1.0 + 1e-12);
}

TEST(BetaSup, RadiusScaling) {
  const Nonlinearity nl(PowerLaw{1.0, 4.0, 0.0});
  const GridShape s(3, 1);
  const BetaEstimate b = beta_sup(nl, s, StructureConstants{2.0, 1.0, 1.0, 2.0});
  EXPECT_DOUBLE_EQ(b.beta, 32.0);
}

TEST(BetaSup, ZeroNonlinearityGivesInfiniteLambdaStar) {
  const GridShape s(2, 2);
  const LambdaStarResult r = compute_lambda_star(Nonlinearity::zero(), s, discrete_constants(OperatorA(s), 1.0));
  EXPECT_EQ(r.beta, 0.0);
  EXPECT_TRUE(std::isinf(r.lambda_star));
}

TEST(BetaSup, NonMonomialFallsBackToMultistart) {
  // f = sin on a single site: sup over |x| <= 2 of |sin x| is 1 at pi/2
  CustomFamily c{"sin", [](double x) { return std::sin(x); }, [](double x) { return 1.0 - std::cos(x); },
                 [](double x) { return std::cos(x); }, true};
  const Nonlinearity nl(c);
  EXPECT_FALSE(closed_form_beta_applicable(nl));
  BetaOptions forced;
  forced.mode = BetaOptions::Mode::closed_form;
  const StructureConstants k{2.0, 1.0, 1.0, 2.0};
  EXPECT_THROW(beta_sup(nl, GridShape(1, 1), k, forced), std::invalid_argument);
  const BetaEstimate b = beta_sup(nl, GridShape(1, 1), k);
  EXPECT_EQ(b.method, BetaMethod::multistart_ascent);
  EXPECT_NEAR(b.beta, 1.0, 1e-9);
  EXPECT_NEAR(std::abs(b.maximizer.values[0]), M_PI / 2, 1e-4);
}

TEST(BetaSup, DeterministicForSeed) {
  const Nonlinearity nl(PolynomialPotential{{0.0, 0.0, 1.0, 0.0, 0.5}});
  const GridShape s(3, 2);
  BetaOptions o;
  o.seed = 4;
  const auto k = discrete_constants(OperatorA(s), 1.0);
  const BetaEstimate a = beta_sup(nl, s, k, o), b = beta_sup(nl, s, k, o);
  EXPECT_EQ(a.beta, b.beta);
  EXPECT_EQ(a.maximizer.values, b.maximizer.values);
}

TEST(Certify, OneByOneCorpus) {
  const GridProblem p = quartic(1, 1, 0.5);
  const CertificateReport zero = certify(p, scalar(0.0));
  EXPECT_EQ(zero.verdict, Verdict::certified);
  EXPECT_LE(zero.residual, 1e-10);

  const CertificateReport root2 = certify(p, scalar(std::sqrt(2.0)));
  EXPECT_EQ(root2.verdict, Verdict::certified);
  EXPECT_LE(root2.residual, 1e-10);

  const CertificateReport one = certify(p, scalar(1.0));
  EXPECT_EQ(one.verdict, Verdict::inconclusive);
  // companion v = lambda f(1)/4 = 0.5: J(1) = 1.5 > J(0.5) = 0.46875
  EXPECT_NEAR(one.companion.values[0], 0.5, 1e-14);
  EXPECT_NEAR(one.j_u, 1.5, 1e-14);
  EXPECT_NEAR(one.j_v, 0.5 - 0.5 * 0.0625, 1e-14);
  EXPECT_FALSE(one.diagnostic.empty());
}

TEST(Certify, BallMarginReported) {
  const GridProblem p = quartic(1, 1, 0.5);
  CertifyOptions o;
  o.rho = 1.0;
  const CertificateReport r = certify(p, scalar(std::sqrt(2.0)), o);
  ASSERT_TRUE(r.ball_margin.has_value());
  EXPECT_NEAR(*r.ball_margin, 1.0 - std::sqrt(2.0), 1e-12);
  EXPECT_FALSE(*r.companion_in_ball);
}

TEST(Certify, ErrorPaths) {
  const GridProblem p = quartic(2, 2, 0.5);
  EXPECT_THROW(certify(p, GridVector::zeros(GridShape(1, 4))), ShapeMismatch);
  GridVector bad = GridVector::zeros(GridShape(2, 2));
  bad.values[1] = NAN;
  EXPECT_THROW(certify(p, bad), std::invalid_argument);
}

TEST(Certify, StalledCompanionIsInconclusive) {
  const GridProblem p = quartic(6, 6, 0.5);
  GridVector u = GridVector::zeros(GridShape(6, 6));
  u.values.setConstant(0.3);
  CertifyOptions o;
  o.max_iter = 1;
  const CertificateReport r = certify(p, u, o);
  EXPECT_EQ(r.verdict, Verdict::inconclusive);
  EXPECT_NE(r.diagnostic.find("companion"), std::string::npos);
}

// Oracle: with the concave part linearized at u, the model
//   m(x) = 1/2 x'Ax - lambda (sum F(u) + f(u)'(x - u))
// satisfies m(u) - m(v) = 1/2 (u - v)'A(u - v) exactly, and for convex F
// J(v) <= m(v), so J(u) - J(v) is at least that much.
TEST(CertifyProperty, GapBoundedByEnergyNormOfDifference) {
  std::mt19937_64 gen(21);
  std::normal_distribution<double> nd;
  for (int r = 0; r < 60; ++r) {
    const GridProblem p = quartic(1 + r % 3, 1 + r % 4, 0.2 + 0.01 * r);
    const auto N = static_cast<Eigen::Index>(p.size());
    Eigen::VectorXd u(N);
    for (Eigen::Index i = 0; i < N; ++i) u[i] = 0.5 * nd(gen);
    const CertificateReport c = certify(p, GridVector(p.shape(), u));
    const Eigen::VectorXd v = c.companion.values;
    const Eigen::VectorXd fu = p.f_vector(u);
    const auto model = [&](const Eigen::VectorXd& x) {
      return 0.5 * x.dot(p.op().apply(x)) - p.lambda() * fu.dot(x - u);
    };
    const Eigen::VectorXd d = u - v;
    const double half_norm = 0.5 * d.dot(p.op().apply(d));
    EXPECT_NEAR(model(u) - model(v), half_norm, 1e-9 * (1.0 + half_norm));
    EXPECT_GE(-c.energy_gap, half_norm - 1e-9 * (1.0 + std::abs(c.j_u)));
    EXPECT_LE(c.energy_gap, 1e-10 * (1.0 + std::abs(c.j_u)));
    if (c.verdict == Verdict::certified) {
      EXPECT_LE(c.residual, 1e-6);
    }
  }
}

TEST(H3Check, PassesAtSmallestEigenvalueAndFailsAbove) {
  const OperatorA op(GridShape(4, 3));
  const auto k = discrete_constants(op, 1.0);
  const H3Report ok = h3_check(op, k, 1000, 1);
  EXPECT_TRUE(ok.passed);
  EXPECT_GE(ok.worst_ratio, k.gamma);

  StructureConstants too_big = k;
  too_big.gamma = op.max_eigenvalue() + 0.1;
  EXPECT_FALSE(h3_check(op, too_big, 50, 1).passed);

  const H3Report none = h3_check(op, k, 0);
  EXPECT_TRUE(none.degenerate);
}
