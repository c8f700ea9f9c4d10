#pragma once

// Quadratic problems on the Stiefel manifold,
//
//   max_{V^T V = I}  Tr(V^T A V) + 2 Tr(V^T B),
//
// solved by generalized power iteration (GPI). With A positive semidefinite
// the objective is convex, so each step V <- polar(2AV + 2B) cannot decrease it.

#include "rudp/matrix.hpp"

namespace rudp {

struct PsdShift {
  Matrix shifted;    // sigma_max * I - A
  double sigma_max;  // largest eigenvalue of A
};

/// sigma_max I - A. On V^T V = I this changes Tr(V^T A V) by the constant
/// sigma_max * q and flips its sign, so maximizing the shifted form
/// minimizes the original.
inline PsdShift shift_to_psd(const Matrix& a) {
  const double sigma = max_eigenvalue(a);  // rejects asymmetric input
  PsdShift out{-a, sigma};
  out.shifted.diagonal().array() += sigma;
  return out;
}

struct QpsmProblem {
  Matrix a;      // p x p, symmetric PSD
  Matrix b;      // p x q
  Matrix start;  // p x q, orthonormal columns
  int max_iters = 200;
  double tol = 1e-10;
  bool spectral_restart = true;  // also run from the sign-aligned top eigenvectors of A
};

struct QpsmSolution {
  Matrix v;
  std::vector<double> ascent_trace;  // objective at the start and after every accepted step of the returned run
  int iterations = 0;
  bool rank_deficient = false;  // some step hit a rank-deficient polar factor
  bool stationary = false;      // v is the caller's start point unchanged
  bool from_spectral = false;   // the returned run began at the spectral start
};

inline double qpsm_objective(const Matrix& a, const Matrix& b, const Matrix& v) {
  return (v.transpose() * a * v).trace() + 2.0 * (v.transpose() * b).trace();
}

namespace detail {

inline QpsmSolution gpi_run(const Matrix& a, const Matrix& b, Matrix start, int max_iters, double tol) {
  QpsmSolution sol;
  sol.v = std::move(start);
  Matrix av = a * sol.v;
  const double linear = (sol.v.transpose() * b).trace();
  double current = (sol.v.transpose() * av).trace() + 2.0 * linear;
  sol.ascent_trace.push_back(current);
  sol.stationary = true;

  for (int it = 0; it < max_iters; ++it) {
    PolarFactor step = polar_orthonormalize(2.0 * (av + b));
    Matrix av_next = a * step.factor;
    const double next = (step.factor.transpose() * av_next).trace() + 2.0 * (step.factor.transpose() * b).trace();
    sol.iterations = it + 1;
    if (!(next > current)) break;  // no ascent left; keep the current point
    sol.rank_deficient = sol.rank_deficient || step.rank_deficient;
    sol.stationary = false;
    const double gain = next - current;
    sol.v = std::move(step.factor);
    av = std::move(av_next);
    current = next;
    sol.ascent_trace.push_back(current);
    if (gain <= tol) break;
  }
  return sol;
}

/// Top-q eigenvectors of A, column k negated when it points away from b_k.
/// For q = 1 GPI started here cannot leave the half-space u^T b >= 0, which
/// holds the global maximizer but no other local one.
inline Matrix spectral_start(const Matrix& a, const Matrix& b) {
  Matrix u = sym_eig(a).vectors.leftCols(b.cols());
  for (Eigen::Index k = 0; k < u.cols(); ++k)
    if (u.col(k).dot(b.col(k)) < 0.0) u.col(k) *= -1.0;
  return u;
}

}  // namespace detail

/// GPI from the caller's start and, optionally, from the spectral start; the
/// run ending higher wins (ties keep the caller's run). The result is never
/// below the objective at the caller's start.
inline QpsmSolution gpi_solve(const QpsmProblem& prob) {
  const Eigen::Index p = prob.a.rows();
  if (prob.a.cols() != p) throw std::invalid_argument("gpi_solve: A is not square");
  if (prob.b.rows() != p || prob.start.rows() != p || prob.start.cols() != prob.b.cols())
    throw std::invalid_argument("gpi_solve: dimension mismatch between A, B and start");
  if (prob.b.cols() > p) throw std::invalid_argument("gpi_solve: q exceeds p");
  if (orthogonality_residual(prob.start) > 1e-8)
    throw std::invalid_argument("gpi_solve: start point is not orthonormal");

  QpsmSolution warm = detail::gpi_run(prob.a, prob.b, prob.start, prob.max_iters, prob.tol);
  if (!prob.spectral_restart) return warm;
  QpsmSolution alt =
      detail::gpi_run(prob.a, prob.b, detail::spectral_start(prob.a, prob.b), prob.max_iters, prob.tol);
  if (!(alt.ascent_trace.back() > warm.ascent_trace.back())) return warm;
  alt.stationary = false;
  alt.from_spectral = true;
  return alt;
}

}  // namespace rudp
