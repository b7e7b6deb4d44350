#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "ballcrit/grid.hpp"

using namespace ballcrit;

namespace {

// Oracle: the matrix written down entry by entry from the stencil.
Eigen::MatrixXd stencil_by_hand(std::size_t m, std::size_t n) {
  const auto N = static_cast<Eigen::Index>(m * n);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(N, N);
  for (std::size_t j = 1; j <= n; ++j) {
    for (std::size_t i = 1; i <= m; ++i) {
      const auto k = static_cast<Eigen::Index>((i - 1) + (j - 1) * m);
      a(k, k) = 4.0;
      if (i > 1) a(k, k - 1) = -1.0;
      if (i < m) a(k, k + 1) = -1.0;
      if (j > 1) a(k, k - static_cast<Eigen::Index>(m)) = -1.0;
      if (j < n) a(k, k + static_cast<Eigen::Index>(m)) = -1.0;
    }
  }
  return a;
}

Eigen::VectorXd random_vector(Eigen::Index n, std::mt19937_64& gen) {
  std::normal_distribution<double> d;
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = d(gen);
  return v;
}

}  // namespace

TEST(GridShape, RejectsEmptyDimensions) {
  EXPECT_THROW(GridShape(0, 3), std::invalid_argument);
  EXPECT_THROW(GridShape(3, 0), std::invalid_argument);
  EXPECT_EQ(GridShape(3, 4).size(), 12u);
}

TEST(GridShape, ColumnBlockFlattening) {
  const GridShape s(3, 2);
  EXPECT_EQ(s.index(1, 1), 0u);
  EXPECT_EQ(s.index(3, 1), 2u);
  EXPECT_EQ(s.index(1, 2), 3u);
  EXPECT_EQ(s.index(3, 2), 5u);
}

TEST(AssembleDense, OneByOne) {
  const Eigen::MatrixXd a = assemble_dense(GridShape(1, 1));
  ASSERT_EQ(a.rows(), 1);
  EXPECT_EQ(a(0, 0), 4.0);
}

TEST(AssembleDense, TwoByOne) {
  const Eigen::MatrixXd a = assemble_dense(GridShape(2, 1));
  Eigen::Matrix2d expect;
  expect << 4, -1, -1, 4;
  EXPECT_EQ(a, Eigen::MatrixXd(expect));
}

TEST(AssembleDense, TwoByTwoBlockStructure) {
  const Eigen::MatrixXd a = assemble_dense(GridShape(2, 2));
  Eigen::Matrix4d expect;
  expect << 4, -1, -1, 0,
           -1, 4, 0, -1,
           -1, 0, 4, -1,
           0, -1, -1, 4;
  EXPECT_EQ(a, Eigen::MatrixXd(expect));
}

TEST(AssembleDense, MatchesHandStencilAndIsSymmetric) {
  for (std::size_t m = 1; m <= 6; ++m)
    for (std::size_t n = 1; n <= 6; ++n) {
      const Eigen::MatrixXd a = assemble_dense(GridShape(m, n));
      EXPECT_EQ(a, stencil_by_hand(m, n)) << m << "x" << n;
      EXPECT_EQ(a, a.transpose());
    }
}

TEST(AssembleDense, ScaleMultipliesEntries) {
  const Eigen::MatrixXd a = assemble_dense(GridShape(1, 1), 4.0);
  EXPECT_EQ(a(0, 0), 16.0);
}

TEST(AssembleDense, CapExceeded) {
  EXPECT_THROW(assemble_dense(GridShape(100, 100), 1.0, 4096), DenseCapExceeded);
  EXPECT_THROW(OperatorA(GridShape(10, 10)).dense(50), DenseCapExceeded);
}

TEST(OperatorA, DenseIsCachedAndSharedAcrossCopies) {
  OperatorA op(GridShape(3, 3));
  EXPECT_FALSE(op.has_dense());
  const Eigen::MatrixXd& d1 = op.dense();
  const OperatorA copy = op;
  EXPECT_TRUE(copy.has_dense());
  EXPECT_EQ(&d1, &copy.dense());
}

TEST(ApplyOperator, UnitVectorGivesColumn) {
  const GridShape s(2, 2);
  const GridVector e1 = GridVector::unit(s, 0);
  const GridVector out = apply_operator(OperatorA(s), e1);
  EXPECT_EQ(out.values, Eigen::Vector4d(4, -1, -1, 0));
}

TEST(ApplyOperator, ZeroGivesZero) {
  const GridShape s(4, 3);
  EXPECT_EQ(apply_operator(OperatorA(s), GridVector::zeros(s)).values.norm(), 0.0);
}

TEST(ApplyOperator, ShapeMismatchThrows) {
  EXPECT_THROW(apply_operator(OperatorA(GridShape(2, 2)), GridVector::zeros(GridShape(4, 1))), ShapeMismatch);
}

TEST(ApplyOperator, StencilAgreesWithDenseProduct) {
  std::mt19937_64 gen(7);
  for (std::size_t m = 1; m <= 12; m += 3)
    for (std::size_t n = 1; n <= 12; n += 2) {
      const GridShape s(m, n);
      const OperatorA op(s, 1.7);
      const Eigen::MatrixXd a = assemble_dense(s, 1.7);
      for (int r = 0; r < 5; ++r) {
        const Eigen::VectorXd u = random_vector(static_cast<Eigen::Index>(s.size()), gen);
        const Eigen::VectorXd dense = a * u;
        EXPECT_LE((op.apply(u) - dense).norm(), 1e-12 * std::max(1.0, dense.norm()));
      }
    }
}

TEST(EigenAnalytic, TwoByTwo) {
  const auto ev = eigen_analytic(GridShape(2, 2));
  ASSERT_EQ(ev.size(), 4u);
  const double expect[] = {2, 4, 4, 6};
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(ev[k], expect[k], 1e-14);
}

TEST(EigenAnalytic, OneByOneAndTwoByOne) {
  EXPECT_NEAR(eigen_analytic(GridShape(1, 1))[0], 4.0, 1e-15);
  const auto ev = eigen_analytic(GridShape(2, 1));
  EXPECT_NEAR(ev[0], 3.0, 1e-14);
  EXPECT_NEAR(ev[1], 5.0, 1e-14);
}

TEST(EigenAnalytic, AgreesWithDenseEigensolver) {
  for (std::size_t m = 1; m <= 8; ++m)
    for (std::size_t n = 1; n <= 8; ++n) {
      const GridShape s(m, n);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(stencil_by_hand(m, n));
      const auto ev = eigen_analytic(s);
      ASSERT_EQ(ev.size(), s.size());
      for (std::size_t k = 0; k < ev.size(); ++k)
        EXPECT_NEAR(ev[k], es.eigenvalues()[static_cast<Eigen::Index>(k)], 1e-10) << m << "x" << n;
      EXPECT_NEAR(OperatorA(s).min_eigenvalue(), es.eigenvalues().minCoeff(), 1e-10);
      EXPECT_NEAR(OperatorA(s).max_eigenvalue(), es.eigenvalues().maxCoeff(), 1e-10);
    }
}

TEST(EigenAnalytic, SortedAscending) {
  const auto ev = eigen_analytic(GridShape(7, 5));
  EXPECT_TRUE(std::is_sorted(ev.begin(), ev.end()));
}

TEST(EigenvectorAnalytic, IsUnitEigenvector) {
  const GridShape s(5, 4);
  const OperatorA op(s);
  for (std::size_t p = 1; p <= s.m; ++p)
    for (std::size_t q = 1; q <= s.n; ++q) {
      const Eigen::VectorXd v = eigenvector_analytic(s, p, q);
      EXPECT_NEAR(v.norm(), 1.0, 1e-13);
      const double lam = 4.0 - 2.0 * std::cos(static_cast<double>(p) * M_PI / 6.0) -
                         2.0 * std::cos(static_cast<double>(q) * M_PI / 5.0);
      EXPECT_LE((op.apply(v) - lam * v).norm(), 1e-12);
    }
}

TEST(OperatorProperties, PositiveDefiniteAndRayleighBound) {
  std::mt19937_64 gen(11);
  std::uniform_int_distribution<std::size_t> dim(1, 12);
  for (int r = 0; r < 1000; ++r) {
    const GridShape s(dim(gen), dim(gen));
    const OperatorA op(s);
    const double a1 = eigen_analytic(s).front();
    ASSERT_GT(a1, 0.0);
    const Eigen::VectorXd u = random_vector(static_cast<Eigen::Index>(s.size()), gen);
    const double q = u.dot(op.apply(u));
    EXPECT_GT(q, 0.0);
    EXPECT_GE(q, a1 * u.squaredNorm() * (1.0 - 1e-12));
  }
}
