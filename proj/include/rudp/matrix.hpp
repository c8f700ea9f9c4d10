#pragma once

// Dense matrix primitives shared by every stage of the optimizer.
//
// Data matrices follow the one-sample-per-column convention: X is d x n.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace rudp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class Axis { columns, rows };

/// Sum of the Euclidean norms of the columns (or rows) of `m`.
inline double l21_norm(const Matrix& m, Axis axis = Axis::columns) {
  double total = 0.0;
  if (axis == Axis::columns) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) total += m.col(j).norm();
  } else {
    for (Eigen::Index i = 0; i < m.rows(); ++i) total += m.row(i).norm();
  }
  return total;
}

/// Subtracts the mean column, i.e. returns X * (I - 11^T / n).
inline Matrix center_columns(const Matrix& x) {
  if (x.cols() == 0) throw std::invalid_argument("center_columns: matrix has no columns");
  const Vector mean = x.rowwise().mean();
  return x.colwise() - mean;
}

/// ||V^T V - I||_F
inline double orthogonality_residual(const Matrix& v) {
  return (v.transpose() * v - Matrix::Identity(v.cols(), v.cols())).norm();
}

inline bool all_finite(const Matrix& m) { return m.allFinite(); }

struct EigResult {
  Vector values;   // descending
  Matrix vectors;  // column i pairs with values(i)
};

namespace detail {
inline Matrix checked_symmetric(const Matrix& a, const char* who) {
  if (a.rows() != a.cols()) throw std::invalid_argument(std::string(who) + ": matrix is not square");
  if (a.rows() == 0) throw std::invalid_argument(std::string(who) + ": empty matrix");
  const double scale = std::max(1.0, a.norm());
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale)
    throw std::invalid_argument(std::string(who) + ": matrix is not symmetric");
  return 0.5 * (a + a.transpose());
}
}  // namespace detail

/// Full spectral decomposition of a symmetric matrix, eigenvalues sorted
/// descending. Rejects non-square input and asymmetry beyond 1e-8 (relative
/// to max(1, ||A||_F)).
inline EigResult sym_eig(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(detail::checked_symmetric(a, "sym_eig"));
  if (solver.info() != Eigen::Success) throw std::runtime_error("sym_eig: eigensolver failed");

  // Eigen returns ascending order.
  const Eigen::Index n = a.rows();
  EigResult out{Vector(n), Matrix(n, n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values(i) = solver.eigenvalues()(n - 1 - i);
    out.vectors.col(i) = solver.eigenvectors().col(n - 1 - i);
  }
  return out;
}

/// Largest eigenvalue of a symmetric matrix; skips the eigenvectors.
inline double max_eigenvalue(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(detail::checked_symmetric(a, "max_eigenvalue"),
                                               Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error("max_eigenvalue: eigensolver failed");
  return solver.eigenvalues()(a.rows() - 1);
}

struct PolarFactor {
  Matrix factor;
  bool rank_deficient = false;
};

/// Orthonormal polar factor U = P Q^T of M = P Sigma Q^T (thin SVD). U is the
/// maximizer of Tr(U^T M) over matrices with orthonormal columns. When M has
/// (numerically) dependent columns the SVD still supplies an orthonormal
/// completion of the column space; the flag reports it.
inline PolarFactor polar_orthonormalize(const Matrix& m) {
  if (m.rows() < m.cols())
    throw std::invalid_argument("polar_orthonormalize: needs rows >= cols");
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();
  PolarFactor out;
  out.factor = svd.matrixU() * svd.matrixV().transpose();
  const double largest = sv.size() ? sv(0) : 0.0;
  const double smallest = sv.size() ? sv(sv.size() - 1) : 0.0;
  out.rank_deficient = !(largest > 0.0) || smallest <= 1e-12 * largest;
  return out;
}

/// Deterministic p x q matrix with orthonormal columns: the polar factor of a
/// seeded Gaussian matrix.
inline Matrix random_orthonormal(Eigen::Index p, Eigen::Index q, std::uint64_t seed) {
  if (p < q) throw std::invalid_argument("random_orthonormal: p < q");
  if (q < 1) throw std::invalid_argument("random_orthonormal: q must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(p, q);
  for (Eigen::Index j = 0; j < q; ++j)
    for (Eigen::Index i = 0; i < p; ++i) g(i, j) = normal(rng);
  return polar_orthonormalize(g).factor;
}

/// splitmix64 finalizer; used to derive independent sub-seeds from one master seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace rudp
