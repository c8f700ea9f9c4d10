#pragma once

// Reference methods: Lloyd k-means with k-means++ seeding, and PCA.

#include "rudp/matrix.hpp"

#include <limits>

namespace rudp {

struct KmeansResult {
  Matrix centers;                    // dim x c, one centre per column
  std::vector<int> labels;           // n entries in [0, c)
  double inertia = 0.0;              // sum of squared distances to assigned centres
  int iterations = 0;
  std::vector<double> inertia_trace; // inertia after every assignment step of the winning run
  bool reseeded_empty = false;
};

struct KmeansOptions {
  std::uint64_t seed = 0;
  int max_iters = 300;
  int restarts = 10;
};

namespace detail {

inline int nearest_center(const Matrix& centers, const Eigen::Ref<const Vector>& x, double* dist) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < centers.cols(); ++k) {
    const double d = (centers.col(k) - x).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(k);
    }
  }
  if (dist) *dist = best_d;
  return best;
}

inline Matrix kmeanspp_seed(const Matrix& pts, int c, std::mt19937_64& rng) {
  const Eigen::Index n = pts.cols();
  Matrix centers(pts.rows(), c);
  std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
  centers.col(0) = pts.col(pick(rng));
  Vector closest(n);
  for (Eigen::Index i = 0; i < n; ++i) closest(i) = (pts.col(i) - centers.col(0)).squaredNorm();
  for (int k = 1; k < c; ++k) {
    const double total = closest.sum();
    Eigen::Index chosen = 0;
    if (total > 0.0) {
      std::uniform_real_distribution<double> u(0.0, total);
      double r = u(rng);
      chosen = n - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        r -= closest(i);
        if (r <= 0.0 && closest(i) > 0.0) {
          chosen = i;
          break;
        }
      }
    } else {
      chosen = pick(rng);
    }
    centers.col(k) = pts.col(chosen);
    for (Eigen::Index i = 0; i < n; ++i)
      closest(i) = std::min(closest(i), (pts.col(i) - centers.col(k)).squaredNorm());
  }
  return centers;
}

inline KmeansResult lloyd(const Matrix& pts, Matrix centers, int max_iters) {
  const Eigen::Index n = pts.cols();
  const int c = static_cast<int>(centers.cols());
  KmeansResult res;
  res.labels.assign(static_cast<std::size_t>(n), -1);
  Vector dist(n);
  for (int it = 0; it < max_iters; ++it) {
    bool changed = false;
    double inertia = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const int k = nearest_center(centers, pts.col(i), &dist(i));
      inertia += dist(i);
      if (k != res.labels[i]) {
        res.labels[i] = k;
        changed = true;
      }
    }
    res.inertia = inertia;
    res.inertia_trace.push_back(inertia);
    res.iterations = it + 1;
    if (!changed && it > 0) break;

    Matrix sums = Matrix::Zero(pts.rows(), c);
    std::vector<int> counts(static_cast<std::size_t>(c), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.col(res.labels[i]) += pts.col(i);
      ++counts[res.labels[i]];
    }
    for (int k = 0; k < c; ++k) {
      if (counts[k] > 0) {
        centers.col(k) = sums.col(k) / counts[k];
        continue;
      }
      // Empty cluster: move it onto the point farthest from its own centre.
      Eigen::Index far = 0;
      dist.maxCoeff(&far);
      centers.col(k) = pts.col(far);
      dist(far) = 0.0;
      res.reseeded_empty = true;
    }
    if (!changed) break;
  }
  res.centers = std::move(centers);
  return res;
}

}  // namespace detail

/// k-means on the columns of `pts`; best of `restarts` seeded runs by inertia.
inline KmeansResult kmeans(const Matrix& pts, int c, const KmeansOptions& opt = {}) {
  if (c < 1) throw std::invalid_argument("kmeans: cluster count must be positive");
  if (pts.cols() < c)
    throw std::invalid_argument("kmeans: fewer points (" + std::to_string(pts.cols()) +
                                ") than clusters (" + std::to_string(c) + ")");
  KmeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < std::max(1, opt.restarts); ++r) {
    std::mt19937_64 rng(mix_seed(opt.seed, static_cast<std::uint64_t>(r)));
    KmeansResult run = detail::lloyd(pts, detail::kmeanspp_seed(pts, c, rng), opt.max_iters);
    if (run.inertia < best.inertia) best = std::move(run);
  }
  return best;
}

struct PcaResult {
  Matrix w;          // d x m, orthonormal
  Matrix projected;  // m x n
  Vector explained;  // variance along each component, non-increasing
};

/// Top-m eigenvectors of a covariance matrix.
inline PcaResult pca_from_covariance(const Matrix& cov, int m) {
  if (m < 1 || m > cov.rows()) throw std::invalid_argument("pca: target dimension out of range");
  const EigResult eig = sym_eig(cov);
  return PcaResult{eig.vectors.leftCols(m), Matrix(), eig.values.head(m)};
}

/// PCA of the columns of X: W = top-m eigenvectors of the covariance of the
/// centred data, projected = W^T (X - mean).
inline PcaResult pca_project(const Matrix& x, int m) {
  if (m < 1 || m > std::min(x.rows(), x.cols()))
    throw std::invalid_argument("pca_project: m=" + std::to_string(m) + " exceeds min(d, n)");
  const Matrix xc = center_columns(x);
  PcaResult out = pca_from_covariance(xc * xc.transpose() / static_cast<double>(x.cols()), m);
  out.projected = out.w.transpose() * xc;
  return out;
}

}  // namespace rudp
