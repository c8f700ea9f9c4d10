#include "oracles.hpp"
#include "rudp/graph.hpp"

#include <gtest/gtest.h>

#include <queue>

using namespace rudp;

namespace {

Matrix points_1d(std::initializer_list<double> v) {
  Matrix m(1, static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) m(0, i++) = x;
  return m;
}

// Grid minimizer of d2 * s + gamma * (s ln s - s) over s = k / 1e5, k = 1..1e5.
double grid_minimum(double d2, double gamma) {
  double best = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= 100000; ++k) {
    const double s = k * 1e-5;
    best = std::min(best, d2 * s + gamma * (s * std::log(s) - s));
  }
  return best;
}

int bfs_components(const Matrix& s, double threshold) {
  const int n = static_cast<int>(s.rows());
  std::vector<int> seen(n, 0);
  int count = 0;
  for (int start = 0; start < n; ++start) {
    if (seen[start]) continue;
    ++count;
    std::queue<int> q;
    q.push(start);
    seen[start] = 1;
    while (!q.empty()) {
      const int v = q.front();
      q.pop();
      for (int u = 0; u < n; ++u)
        if (!seen[u] && u != v && 0.5 * (s(v, u) + s(u, v)) > threshold) {
          seen[u] = 1;
          q.push(u);
        }
    }
  }
  return count;
}

}  // namespace

TEST(PairwiseDists, Examples) {
  EXPECT_EQ(pairwise_sq_dists(Matrix::Ones(3, 4)).cwiseAbs().maxCoeff(), 0.0);
  const Matrix d = pairwise_sq_dists(points_1d({0, 3}));
  EXPECT_DOUBLE_EQ(d(0, 1), 9.0);
  EXPECT_DOUBLE_EQ(d(1, 0), 9.0);
  std::mt19937_64 rng(1);
  const Matrix p = oracle::random_matrix(rng, 4, 10);
  EXPECT_LE((pairwise_sq_dists(p) - oracle::sq_dists(p)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Bandwidths, Examples) {
  const Bandwidths same = select_bandwidths(pairwise_sq_dists(Matrix::Zero(2, 5)), 2);
  for (Eigen::Index i = 0; i < same.size(); ++i) EXPECT_EQ(same(i), kBandwidthFloor);

  const Bandwidths g = select_bandwidths(pairwise_sq_dists(points_1d({0, 1, 10})), 1);
  EXPECT_DOUBLE_EQ(g(0), 1.0);
  EXPECT_DOUBLE_EQ(g(2), 81.0);

  EXPECT_THROW(select_bandwidths(Matrix::Zero(1, 1), 1), std::invalid_argument);
  EXPECT_THROW(select_bandwidths(Matrix::Zero(3, 3), 3), std::invalid_argument);
}

TEST(Bandwidths, MatchSortAndAverage) {
  std::mt19937_64 rng(2);
  const Matrix d2 = pairwise_sq_dists(oracle::random_matrix(rng, 3, 12));
  for (int knn : {1, 4, 11}) {
    const Bandwidths g = select_bandwidths(d2, knn);
    for (int i = 0; i < 12; ++i) {
      std::vector<double> row;
      for (int j = 0; j < 12; ++j)
        if (j != i) row.push_back(d2(i, j));
      std::sort(row.begin(), row.end());
      double sum = 0.0;
      for (int k = 0; k < knn; ++k) sum += row[k];
      EXPECT_EQ(g(i), std::max(sum / knn, kBandwidthFloor));
    }
  }
}

TEST(Similarity, Examples) {
  Matrix d2(2, 2);
  d2 << 0, 2, 2, 0;
  const Matrix s = similarity_closed_form(d2, Vector::Constant(2, 2.0));
  EXPECT_EQ(s(0, 0), 1.0);
  EXPECT_NEAR(s(0, 1), 0.36787944117144233, 1e-15);
  EXPECT_THROW(similarity_closed_form(d2, Vector::Zero(2)), std::invalid_argument);
}

TEST(Similarity, BeatsGrid) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ud(0.0, 5.0), ug(0.05, 5.0);
  for (int trial = 0; trial < 10; ++trial) {
    const double d2 = ud(rng), gamma = ug(rng);
    Matrix m(1, 1);
    m << d2;
    const double s = similarity_closed_form(m, Vector::Constant(1, gamma))(0, 0);
    const double value = d2 * s + gamma * (s * std::log(s) - s);
    EXPECT_LE(value, grid_minimum(d2, gamma) + 1e-12);
  }
}

TEST(Similarity, SymmetricForEqualBandwidths) {
  std::mt19937_64 rng(4);
  const Matrix d2 = pairwise_sq_dists(oracle::random_matrix(rng, 2, 8));
  const Matrix s = similarity_closed_form(d2, Vector::Constant(8, 0.7));
  EXPECT_EQ((s - s.transpose()).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_GT(s.minCoeff(), 0.0);
  EXPECT_LE(s.maxCoeff(), 1.0);
}

TEST(Laplacian, Examples) {
  EXPECT_EQ(laplacian(Matrix::Zero(3, 3)).cwiseAbs().maxCoeff(), 0.0);
  Matrix s(2, 2);
  s << 0, 1, 1, 0;
  Matrix expected(2, 2);
  expected << 1, -1, -1, 1;
  EXPECT_EQ(laplacian(s), expected);
}

TEST(Laplacian, PsdZeroRowSumsAndQuadraticForm) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    Matrix s(9, 9);
    for (int i = 0; i < 9; ++i)
      for (int j = 0; j < 9; ++j) s(i, j) = u(rng);
    const Matrix l = laplacian(s);
    EXPECT_LE((l - l.transpose()).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_LE(l.rowwise().sum().cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_GE(sym_eig(l).values.minCoeff(), -1e-9);

    const Vector x = oracle::random_matrix(rng, 9, 1);
    double pairs = 0.0;
    for (int i = 0; i < 9; ++i)
      for (int j = i + 1; j < 9; ++j) pairs += 0.5 * (s(i, j) + s(j, i)) * (x(i) - x(j)) * (x(i) - x(j));
    EXPECT_NEAR(x.dot(l * x), pairs, 1e-9);

    // the diagonal of S does not matter
    Matrix s2 = s;
    s2.diagonal().setConstant(0.25);
    EXPECT_LE((laplacian(s2) - l).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Entropy, Examples) {
  EXPECT_DOUBLE_EQ(entropy_term(Matrix::Ones(4, 4), Vector::Ones(4)), -16.0);
  EXPECT_EQ(entropy_term(Matrix::Zero(4, 4), Vector::Ones(4)), 0.0);

  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix s(5, 5);
  Vector g(5);
  for (int i = 0; i < 5; ++i) {
    g(i) = u(rng) + 0.1;
    for (int j = 0; j < 5; ++j) s(i, j) = u(rng);
  }
  double loop = 0.0;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) loop += g(i) * (s(i, j) * std::log(s(i, j)) - s(i, j));
  EXPECT_NEAR(entropy_term(s, g), loop, 1e-12);
}

TEST(Entropy, EntryMinimizedAtOneForZeroDistance) {
  // derivative d2 + gamma ln s vanishes at s = 1 when d2 = 0
  const double gamma = 0.8;
  auto f = [&](double s) { return gamma * (s * std::log(s) - s); };
  for (double s = 0.01; s < 1.0; s += 0.01) EXPECT_GT(f(s), f(1.0));
}

TEST(Smoothness, Examples) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix s(6, 6);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) s(i, j) = u(rng);
  const Matrix l = laplacian(s);
  Matrix constant_rows(6, 2);
  constant_rows.col(0).setConstant(0.3);
  constant_rows.col(1).setConstant(-1.2);
  EXPECT_NEAR(smoothness(constant_rows, l), 0.0, 1e-12);
  EXPECT_EQ(smoothness(oracle::random_matrix(rng, 6, 2), laplacian(Matrix::Zero(6, 6))), 0.0);

  const Matrix g = oracle::random_matrix(rng, 6, 3);
  double pairs = 0.0;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) pairs += 0.5 * (g.row(i) - g.row(j)).squaredNorm() * 0.5 * (s(i, j) + s(j, i));
  EXPECT_NEAR(smoothness(g, l), pairs, 1e-9);
  EXPECT_THROW(smoothness(Matrix::Zero(5, 2), l), std::invalid_argument);
}

TEST(Components, Examples) {
  Matrix blocks = Matrix::Zero(5, 5);
  blocks.topLeftCorner(2, 2).setOnes();
  blocks.bottomRightCorner(3, 3).setOnes();
  EXPECT_EQ(connected_components(blocks, 0.0), 2);
  EXPECT_EQ(connected_components(Matrix::Ones(5, 5), 0.5), 1);
}

TEST(Components, UnionFindMatchesBfs) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    Matrix s(15, 15);
    for (int i = 0; i < 15; ++i)
      for (int j = 0; j < 15; ++j) s(i, j) = u(rng) < 0.12 ? u(rng) : 0.0;
    for (double th : {0.0, 0.3}) EXPECT_EQ(connected_components(s, th), bfs_components(s, th));
  }
}

TEST(Similarity, SubnormalsBecomeZero) {
  Matrix d2(1, 3);
  d2 << 700.0, 720.0, 800.0;  // exp(-720) is subnormal
  const Matrix s = similarity_closed_form(d2, Bandwidths::Ones(1));
  EXPECT_GE(s(0, 0), std::numeric_limits<double>::min());
  EXPECT_EQ(s(0, 1), 0.0);
  EXPECT_EQ(s(0, 2), 0.0);
}
