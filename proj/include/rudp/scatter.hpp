#pragma once

// Scatter matrices of a labelled data set and the link between the
// centre/indicator factorization and within-class scatter.

#include "rudp/matrix.hpp"

#include <span>

namespace rudp {

/// n x c 0/1 indicator matrix for hard labels in [0, classes).
inline Matrix indicator_matrix(std::span<const int> labels, int classes) {
  if (classes < 1) throw std::invalid_argument("indicator_matrix: classes must be positive");
  Matrix g = Matrix::Zero(static_cast<Eigen::Index>(labels.size()), classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= classes)
      throw std::invalid_argument("indicator_matrix: label " + std::to_string(labels[i]) +
                                  " outside [0, " + std::to_string(classes) + ")");
    g(static_cast<Eigen::Index>(i), labels[i]) = 1.0;
  }
  return g;
}

struct ScatterMatrices {
  Matrix total;
  Matrix between;
  Matrix within;
};

/// St = X H X^T, Sb = X H G (G^T G)^-1 G^T H X^T, Sw = St - Sb.
/// Every class must own at least one sample.
inline ScatterMatrices scatter_matrices(const Matrix& x, std::span<const int> labels, int classes) {
  if (static_cast<Eigen::Index>(labels.size()) != x.cols())
    throw std::invalid_argument("scatter_matrices: label count does not match sample count");
  const Matrix g = indicator_matrix(labels, classes);
  const Vector counts = g.colwise().sum().transpose();
  for (Eigen::Index k = 0; k < counts.size(); ++k)
    if (counts(k) == 0.0)
      throw std::invalid_argument("scatter_matrices: class " + std::to_string(k) + " is empty");

  const Matrix xc = center_columns(x);
  ScatterMatrices s;
  s.total = xc * xc.transpose();
  // G^T G is diagonal with the class counts.
  const Matrix class_sums = xc * g;
  s.between = class_sums * counts.cwiseInverse().asDiagonal() * class_sums.transpose();
  s.within = s.total - s.between;
  return s;
}

/// F = W^T X G (G^T G)^-1, the minimizer of ||W^T X - F G^T||_F^2 over F.
inline Matrix optimal_center(const Matrix& w, const Matrix& x, const Matrix& g) {
  const Matrix gram = g.transpose() * g;
  Eigen::LLT<Matrix> llt(gram);
  if (llt.info() != Eigen::Success || gram.diagonal().minCoeff() <= 0.0)
    throw std::invalid_argument("optimal_center: G^T G is singular");
  const Matrix rhs = (w.transpose() * x * g).transpose();
  return llt.solve(rhs).transpose();
}

/// |min_F ||W^T X - F G^T||_F^2 - Tr(W^T Sw W)| for the hard indicator G of
/// `labels`. The two quantities coincide, so this is a numerical residual.
inline double within_scatter_gap(const Matrix& w, const Matrix& x, std::span<const int> labels,
                                 int classes) {
  const Matrix g = indicator_matrix(labels, classes);
  const Matrix f = optimal_center(w, x, g);
  const double factorization = (w.transpose() * x - f * g.transpose()).squaredNorm();
  const ScatterMatrices s = scatter_matrices(x, labels, classes);
  const double trace = (w.transpose() * s.within * w).trace();
  return std::abs(factorization - trace);
}

}  // namespace rudp
