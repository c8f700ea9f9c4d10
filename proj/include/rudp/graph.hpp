#pragma once

// Similarity graph learning: distances, per-sample bandwidths, the
// closed-form similarity, Laplacian, entropy regularizer and diagnostics.

#include "rudp/matrix.hpp"

#include <limits>
#include <numeric>

namespace rudp {

/// Per-sample bandwidths gamma_i > 0.
using Bandwidths = Vector;

inline constexpr double kBandwidthFloor = 1e-12;

/// n x n squared Euclidean distances between the columns of `points`.
/// Computed by direct differences so coincident points give exactly 0.
inline Matrix pairwise_sq_dists(const Matrix& points) {
  const Eigen::Index n = points.cols();
  Matrix d2 = Matrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double v = (points.col(i) - points.col(j)).squaredNorm();
      d2(i, j) = v;
      d2(j, i) = v;
    }
  }
  return d2;
}

/// gamma_i = mean of the `knn` smallest off-diagonal entries of row i of D2,
/// floored at 1e-12.
inline Bandwidths select_bandwidths(const Matrix& d2, int knn) {
  const Eigen::Index n = d2.rows();
  if (n < 2) throw std::invalid_argument("select_bandwidths: need at least two points");
  if (knn < 1 || knn > n - 1)
    throw std::invalid_argument("select_bandwidths: knn must lie in [1, n-1], got " +
                                std::to_string(knn));
  Bandwidths gamma(n);
  std::vector<double> row;
  row.reserve(static_cast<std::size_t>(n - 1));
  for (Eigen::Index i = 0; i < n; ++i) {
    row.clear();
    for (Eigen::Index j = 0; j < n; ++j)
      if (j != i) row.push_back(d2(i, j));
    std::partial_sort(row.begin(), row.begin() + knn, row.end());
    const double mean = std::accumulate(row.begin(), row.begin() + knn, 0.0) / knn;
    gamma(i) = std::max(mean, kBandwidthFloor);
  }
  return gamma;
}

/// s_ij = exp(-d2_ij / gamma_i): the per-entry minimizer of
/// d2 * s + gamma * (s ln s - s) on [0, 1]. Values below the smallest normal
/// double are stored as 0; subnormals make every later product with S crawl.
inline Matrix similarity_closed_form(const Matrix& d2, const Bandwidths& gamma) {
  if (gamma.size() != d2.rows()) throw std::invalid_argument("similarity_closed_form: size mismatch");
  if (gamma.minCoeff() <= 0.0) throw std::invalid_argument("similarity_closed_form: gamma must be positive");
  constexpr double tiny = std::numeric_limits<double>::min();
  Matrix s(d2.rows(), d2.cols());
  for (Eigen::Index i = 0; i < d2.rows(); ++i)
    for (Eigen::Index j = 0; j < d2.cols(); ++j) {
      const double v = std::exp(-d2(i, j) / gamma(i));
      s(i, j) = v < tiny ? 0.0 : v;
    }
  return s;
}

/// L = D_S - (S + S^T)/2 with (D_S)_ii = sum_j (s_ij + s_ji)/2. The diagonal of
/// S cancels out.
inline Matrix laplacian(const Matrix& s) {
  if (s.rows() != s.cols()) throw std::invalid_argument("laplacian: S is not square");
  Matrix adjacency = 0.5 * (s + s.transpose());
  Matrix l = -adjacency;
  l.diagonal() += adjacency.rowwise().sum();
  return l;
}

/// sum_i gamma_i sum_j (s_ij ln s_ij - s_ij), with 0 ln 0 = 0.
inline double entropy_term(const Matrix& s, const Bandwidths& gamma) {
  if (gamma.size() != s.rows()) throw std::invalid_argument("entropy_term: size mismatch");
  double total = 0.0;
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    double row = 0.0;
    for (Eigen::Index j = 0; j < s.cols(); ++j) {
      const double v = s(i, j);
      row += (v > 0.0 ? v * std::log(v) : 0.0) - v;
    }
    total += gamma(i) * row;
  }
  return total;
}

/// Tr(G^T L G).
inline double smoothness(const Matrix& g, const Matrix& l) {
  if (l.rows() != l.cols() || l.cols() != g.rows())
    throw std::invalid_argument("smoothness: dimension mismatch between G and L");
  return (g.transpose() * l * g).trace();
}

/// Connected components of the undirected graph with an edge (i, j) whenever
/// (s_ij + s_ji)/2 > threshold.
inline int connected_components(const Matrix& s, double threshold) {
  const Eigen::Index n = s.rows();
  std::vector<Eigen::Index> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), Eigen::Index{0});
  auto find = [&](Eigen::Index v) {
    while (parent[v] != v) {
      parent[v] = parent[parent[v]];
      v = parent[v];
    }
    return v;
  };
  int components = static_cast<int>(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (0.5 * (s(i, j) + s(j, i)) <= threshold) continue;
      const auto a = find(i), b = find(j);
      if (a != b) {
        parent[a] = b;
        --components;
      }
    }
  }
  return components;
}

}  // namespace rudp
