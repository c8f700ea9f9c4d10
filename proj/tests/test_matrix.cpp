#include "oracles.hpp"
#include "rudp/matrix.hpp"

#include <gtest/gtest.h>

using namespace rudp;

TEST(L21Norm, Examples) {
  Matrix m(2, 2);
  m << 3, 0, 4, 0;
  EXPECT_DOUBLE_EQ(l21_norm(m, Axis::columns), 5.0);
  EXPECT_DOUBLE_EQ(l21_norm(Matrix::Identity(2, 2), Axis::columns), 2.0);
}

TEST(L21Norm, MatchesLoopAndTransposeRule) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix m = oracle::random_matrix(rng, 3, 4);
    EXPECT_NEAR(l21_norm(m, Axis::columns), oracle::l21_columns(m), 1e-12);
    EXPECT_EQ(l21_norm(m, Axis::columns), l21_norm(m.transpose(), Axis::rows));
  }
}

TEST(CenterColumns, Examples) {
  Matrix x(1, 2);
  x << 1, 3;
  Matrix expected(1, 2);
  expected << -1, 1;
  EXPECT_TRUE(center_columns(x).isApprox(expected));

  std::mt19937_64 rng(2);
  const Matrix r = oracle::random_matrix(rng, 4, 9);
  const Matrix c = center_columns(r);
  EXPECT_LE(c.rowwise().sum().cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LE((center_columns(c) - c).cwiseAbs().maxCoeff(), 1e-12);

  // X H with H = I - 11^T / n
  const Matrix h = Matrix::Identity(9, 9) - Matrix::Constant(9, 9, 1.0 / 9.0);
  EXPECT_LE((c - r * h).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SymEig, DiagonalAndIdentity) {
  Matrix a = Eigen::Vector2d(3, 1).asDiagonal();
  const EigResult e = sym_eig(a);
  EXPECT_DOUBLE_EQ(e.values(0), 3.0);
  EXPECT_DOUBLE_EQ(e.values(1), 1.0);
  EXPECT_NEAR(std::abs(e.vectors(0, 0)), 1.0, 1e-12);
  EXPECT_NEAR(std::abs(e.vectors(1, 1)), 1.0, 1e-12);

  const EigResult id = sym_eig(Matrix::Identity(4, 4));
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(id.values(i), 1.0, 1e-14);
}

TEST(SymEig, TwoByTwoMatchesQuadraticFormula) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double a = g(rng), b = g(rng), d = g(rng);
    Matrix m(2, 2);
    m << a, b, b, d;
    const auto [hi, lo] = oracle::eig2(a, b, d);
    const EigResult e = sym_eig(m);
    EXPECT_NEAR(e.values(0), hi, 1e-9);
    EXPECT_NEAR(e.values(1), lo, 1e-9);
  }
}

TEST(SymEig, DecompositionInvariants) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix r = oracle::random_matrix(rng, 7, 7);
    const Matrix a = r + r.transpose();
    const EigResult e = sym_eig(a);
    EXPECT_LE(orthogonality_residual(e.vectors), 1e-10);
    const Matrix recon = e.vectors * e.values.asDiagonal() * e.vectors.transpose();
    EXPECT_LE((a - recon).norm(), 1e-7 * std::max(1.0, a.norm()));
    for (int i = 0; i < 7; ++i) {
      EXPECT_LE((a * e.vectors.col(i) - e.values(i) * e.vectors.col(i)).norm(), 1e-8 * a.norm());
      if (i > 0) { EXPECT_GE(e.values(i - 1), e.values(i)); }
    }
  }
}

TEST(SymEig, MaxEigenvalueMatchesFullDecomposition) {
  std::mt19937_64 rng(9);
  for (int n : {1, 4, 30}) {
    const Matrix r = oracle::random_matrix(rng, n, n);
    const Matrix a = r + r.transpose();
    EXPECT_NEAR(max_eigenvalue(a), sym_eig(a).values(0), 1e-10 * std::max(1.0, a.norm()));
  }
  EXPECT_THROW(max_eigenvalue(Matrix::Zero(2, 3)), std::invalid_argument);
}

TEST(SymEig, RejectsBadInput) {
  EXPECT_THROW(sym_eig(Matrix::Zero(2, 3)), std::invalid_argument);
  Matrix a(2, 2);
  a << 1, 2, 0, 1;
  EXPECT_THROW(sym_eig(a), std::invalid_argument);
}

TEST(Polar, Examples) {
  std::mt19937_64 rng(5);
  const Matrix u = oracle::random_stiefel(rng, 5, 3);
  EXPECT_LE((polar_orthonormalize(u).factor - u).cwiseAbs().maxCoeff(), 1e-10);

  Matrix d = Eigen::Vector2d(2, 3).asDiagonal();
  EXPECT_LE((polar_orthonormalize(d).factor - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_FALSE(polar_orthonormalize(d).rank_deficient);
}

TEST(Polar, MaximizesTraceOverRandomCandidates) {
  std::mt19937_64 rng(6);
  const Matrix m = oracle::random_matrix(rng, 5, 2);
  const PolarFactor p = polar_orthonormalize(m);
  const double best = (p.factor.transpose() * m).trace();
  for (int k = 0; k < 10000; ++k) {
    const Matrix cand = oracle::random_stiefel(rng, 5, 2);
    ASSERT_GE(best - (cand.transpose() * m).trace(), 0.0);
  }
}

TEST(Polar, RecoversOrthonormalFactorOfUP) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix u = oracle::random_stiefel(rng, 6, 3);
    const Matrix r = oracle::random_matrix(rng, 3, 3);
    const Matrix p = r * r.transpose() + 0.1 * Matrix::Identity(3, 3);
    EXPECT_LE((polar_orthonormalize(u * p).factor - u).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(Polar, RankDeficientIsFlaggedAndStillOrthonormal) {
  Matrix m = Matrix::Zero(4, 2);
  m(0, 0) = 1.0;
  m(1, 0) = 1.0;
  const PolarFactor p = polar_orthonormalize(m);
  EXPECT_TRUE(p.rank_deficient);
  EXPECT_LE(orthogonality_residual(p.factor), 1e-10);
  EXPECT_THROW(polar_orthonormalize(Matrix::Ones(2, 3)), std::invalid_argument);
}

TEST(RandomOrthonormal, DeterministicAndOrthonormal) {
  const Matrix a = random_orthonormal(3, 3, 7), b = random_orthonormal(3, 3, 7);
  EXPECT_TRUE((a.array() == b.array()).all());
  EXPECT_LE(orthogonality_residual(random_orthonormal(5, 2, 11)), 1e-10);
  EXPECT_NEAR(random_orthonormal(4, 1, 3).norm(), 1.0, 1e-12);
  EXPECT_FALSE(random_orthonormal(5, 2, 1).isApprox(random_orthonormal(5, 2, 2)));
  EXPECT_THROW(random_orthonormal(2, 3, 0), std::invalid_argument);
}
