#pragma once

// Robust unsupervised discriminative projection.
//
// Minimizes, over W (d x m, W^T W = I), F (m x c), G (n x c, G^T G = I) and
// the similarity matrix S,
//
//   J = ||W^T X - F G^T||_{2,1} / ||X^T W||_{2,1}
//       + lambda * Tr(G^T L_S G)
//       + beta * sum_i gamma_i sum_j (s_ij ln s_ij - s_ij)
//
// by alternating updates. Every update is a majorize-minimize step on J, so
// the objective recorded after each sweep never increases.

#include "rudp/baselines.hpp"
#include "rudp/graph.hpp"
#include "rudp/qpsm.hpp"

#include <optional>

namespace rudp {

/// How hard labels are read off the relaxed indicator G.
enum class LabelRule {
  kmeans_rows,  // k-means on the rows of G (rotation invariant)
  row_argmax,   // labels_from_indicator
};

struct Hyperparams {
  double lambda = 0.1;  // graph smoothness weight
  double beta = 0.1;    // entropy weight
  int dim = 5;          // m, projected dimension
  int clusters = 3;     // c
  int knn = 10;         // neighbourhood size for the bandwidths
  int max_outer_iters = 100;
  double eps_converge = 1e-5;
  double eps_guard = 1e-8;  // floor for every norm that ends up in a denominator
  std::uint64_t seed = 0;
  int gpi_max_iters = 200;
  double gpi_tol = 1e-10;
  double component_threshold = 0.5;  // edge cut-off for the connectivity diagnostic
  LabelRule label_rule = LabelRule::kmeans_rows;
};

inline void validate(const Hyperparams& hp, Eigen::Index d, Eigen::Index n) {
  auto fail = [](const std::string& what) { throw std::invalid_argument("hyperparameters: " + what); };
  if (!(hp.lambda >= 0.0) || !std::isfinite(hp.lambda)) fail("lambda must be finite and >= 0");
  if (!(hp.beta > 0.0) || !std::isfinite(hp.beta)) fail("beta must be finite and > 0");
  if (hp.dim < 1 || hp.dim > d)
    fail("dim must lie in [1, " + std::to_string(d) + "], got " + std::to_string(hp.dim));
  if (hp.clusters < 2 || hp.clusters > n)
    fail("clusters must lie in [2, " + std::to_string(n) + "], got " + std::to_string(hp.clusters));
  if (hp.knn < 1 || hp.knn > n - 1) fail("knn must lie in [1, n-1], got " + std::to_string(hp.knn));
  if (hp.max_outer_iters < 1) fail("max_outer_iters must be positive");
  if (!(hp.eps_converge > 0.0)) fail("eps_converge must be positive");
  if (!(hp.eps_guard > 0.0)) fail("eps_guard must be positive");
  if (hp.gpi_max_iters < 1) fail("gpi_max_iters must be positive");
}

struct ModelState {
  Matrix w;          // d x m
  Matrix f;          // m x c
  Matrix g;          // n x c
  Matrix s;          // n x n
  Vector d;          // residual weights d_ii
  Bandwidths gamma;  // per-sample bandwidths of the entropy term
};

/// Error raised when an update produces non-finite values.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Objective

struct ObjectiveParts {
  double ratio = 0.0;       // ||W^T X - F G^T||_{2,1} / ||X^T W||_{2,1}
  double smoothness = 0.0;  // Tr(G^T L_S G)
  double entropy = 0.0;     // sum_i gamma_i sum_j (s ln s - s)
  double total = 0.0;
};

/// ||X^T W||_{2,1}: sum over samples of the projected norms.
inline double projected_mass(const Matrix& w, const Matrix& x) {
  return l21_norm(w.transpose() * x, Axis::columns);
}

inline ObjectiveParts objective_parts(const ModelState& st, const Matrix& x, const Hyperparams& hp) {
  const double den = projected_mass(st.w, x);
  if (!(den > hp.eps_guard))
    throw std::domain_error("objective: ||X^T W||_{2,1} vanishes; the projection W annihilates the data");
  ObjectiveParts p;
  p.ratio = l21_norm(st.w.transpose() * x - st.f * st.g.transpose(), Axis::columns) / den;
  p.smoothness = smoothness(st.g, laplacian(st.s));
  p.entropy = entropy_term(st.s, st.gamma);
  p.total = p.ratio + hp.lambda * p.smoothness + hp.beta * p.entropy;
  return p;
}

inline double objective(const ModelState& st, const Matrix& x, const Hyperparams& hp) {
  return objective_parts(st, x, hp).total;
}

// ---------------------------------------------------------------------------
// Updates

/// d_ii = 1 / (2 max(||(W^T X - F G^T)_i||, eps_guard)).
inline Vector residual_weights(const ModelState& st, const Matrix& x, double eps_guard) {
  const Matrix r = st.w.transpose() * x - st.f * st.g.transpose();
  Vector d(r.cols());
  for (Eigen::Index i = 0; i < r.cols(); ++i) d(i) = 0.5 / std::max(r.col(i).norm(), eps_guard);
  return d;
}

/// Upper bound on ||a|| that is tight at ||a|| = ||b||:
///   ||a|| <= ||a||^2 / (2||b||) + ||b|| / 2   for b != 0.
/// Every reweighted (D, p_i) step minimizes this bound summed over samples.
inline double norm_majorant(double a_norm, double b_norm) {
  return a_norm * a_norm / (2.0 * b_norm) + 0.5 * b_norm;
}

namespace detail {

/// D G (G^T D G)^-1, so that F = W^T X K and U = X K G^T.
inline Matrix weighted_projector(const Vector& d, const Matrix& g) {
  const Matrix dg = d.asDiagonal() * g;
  const Matrix gram = g.transpose() * dg;
  Eigen::LLT<Matrix> llt(gram);
  if (llt.info() != Eigen::Success) throw std::domain_error("G^T D G is singular");
  return llt.solve(dg.transpose()).transpose();
}

}  // namespace detail

/// F = W^T X D G (G^T D G)^-1, the minimizer of Tr((W^T X - F G^T) D (W^T X - F G^T)^T).
inline Matrix update_f(const ModelState& st, const Matrix& x) {
  return st.w.transpose() * (x * detail::weighted_projector(st.d, st.g));
}

struct GUpdate {
  Matrix g;
  QpsmSolution solve;
  double sigma_max = 0.0;
  bool degenerate = false;  // subproblem was stationary at the previous G
};

/// The G-subproblem as a Stiefel QP. With D and the ratio denominator fixed,
/// the weighted fit term (1/den) sum_i d_ii ||W^T x_i - F g_i||^2 has the
/// quadratic part Tr(G^T D G F^T F); it is replaced by its tangent plus the
/// proximal bound tau ||G - G_prev||^2 (tau = max d_ii * lambda_max(F^T F)),
/// which is linear in G on the manifold. The Laplacian term is kept exactly.
inline QpsmProblem g_subproblem(const ModelState& st, const Matrix& x, const Hyperparams& hp,
                                double* sigma_max = nullptr) {
  const double den = projected_mass(st.w, x);
  if (!(den > hp.eps_guard)) throw std::domain_error("update_G: ||X^T W||_{2,1} vanishes");
  const Matrix r1 = hp.lambda * laplacian(st.s);
  PsdShift shift = shift_to_psd(r1);
  if (sigma_max) *sigma_max = shift.sigma_max;

  const Matrix ftf = st.f.transpose() * st.f;
  const double tau = st.d.maxCoeff() * std::max(0.0, max_eigenvalue(ftf));
  const Matrix r2 = x.transpose() * st.w * st.f - st.g * ftf;
  Matrix b = (st.d.asDiagonal() * r2 + tau * st.g) / den;
  // The warm start is already near the proximal optimum; an n x n
  // eigendecomposition for a second start costs more than it recovers.
  return QpsmProblem{std::move(shift.shifted), std::move(b), st.g, hp.gpi_max_iters, hp.gpi_tol, false};
}

inline GUpdate update_g(const ModelState& st, const Matrix& x, const Hyperparams& hp) {
  GUpdate out;
  out.solve = gpi_solve(g_subproblem(st, x, hp, &out.sigma_max));
  out.g = out.solve.v;
  out.degenerate = out.solve.stationary;
  return out;
}

enum class BandwidthPolicy { reselect, keep };

struct SUpdate {
  Matrix s;
  Bandwidths gamma;
};

/// Exact minimizer of J over S. With d_ij = ||g_i - g_j||, the S-dependent
/// part of J is sum_ij (lambda/2) d_ij^2 s_ij + beta gamma_i (s_ij ln s_ij - s_ij),
/// minimized entrywise by the closed form with bandwidth 2 beta gamma_i / lambda.
inline SUpdate update_s(const ModelState& st, const Hyperparams& hp,
                        BandwidthPolicy policy = BandwidthPolicy::reselect) {
  const Matrix d2 = pairwise_sq_dists(st.g.transpose());
  SUpdate out;
  if (policy == BandwidthPolicy::reselect || st.gamma.size() != d2.rows())
    out.gamma = select_bandwidths(d2, hp.knn);
  else
    out.gamma = st.gamma;
  if (hp.lambda == 0.0) {
    out.s = Matrix::Ones(d2.rows(), d2.cols());
  } else {
    out.s = similarity_closed_form(d2, out.gamma * (2.0 * hp.beta / hp.lambda));
  }
  return out;
}

struct WUpdate {
  Matrix w;
  Matrix f;            // W^T X D G (G^T D G)^-1 at the new W
  double xi = 0.0;     // ratio at the incoming W
  double ratio = 0.0;  // ratio at the new W; never above xi
  QpsmSolution solve;
};

/// Ratio step. With U = X D G (G^T D G)^-1 G^T (the fit reached by the optimal
/// F for any W), minimizes sum_i ||W^T(x_i - u_i)|| / sum_i ||W^T x_i|| by one
/// non-greedy surrogate step:
///   min_W  sum_i p_i ||W^T(x_i - u_i)||^2 - xi sum_i mu_i^T W^T x_i,
/// p_i = 1 / (2 ||W^T(x_i - u_i)||), mu_i = W^T x_i / ||W^T x_i|| (0 if that norm
/// is 0), xi the ratio at the incoming W. The returned F keeps F G^T = W^T U.
inline WUpdate update_w(const ModelState& st, const Matrix& x, const Hyperparams& hp) {
  if (x.cwiseAbs().maxCoeff() == 0.0) throw std::invalid_argument("update_W: data matrix is all zeros");
  const Eigen::Index n = x.cols();
  const Matrix k = detail::weighted_projector(st.d, st.g);
  const Matrix e = x - (x * k) * st.g.transpose();  // X - U

  const Matrix pe = st.w.transpose() * e;
  const Matrix px = st.w.transpose() * x;
  Vector p(n);
  Matrix mu = Matrix::Zero(px.rows(), n);
  double num = 0.0, den = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double a = pe.col(i).norm();
    const double b = px.col(i).norm();
    num += a;
    den += b;
    p(i) = 0.5 / std::max(a, hp.eps_guard);
    if (b != 0.0) mu.col(i) = px.col(i) / b;
  }

  WUpdate out;
  out.xi = num / std::max(den, hp.eps_guard);

  const Matrix a = e * p.asDiagonal() * e.transpose();
  const Matrix bmat = x * mu.transpose();  // sum_i x_i mu_i^T
  PsdShift shift = shift_to_psd(0.5 * (a + a.transpose()));
  out.solve = gpi_solve(QpsmProblem{std::move(shift.shifted), 0.5 * out.xi * bmat, st.w,
                                    hp.gpi_max_iters, hp.gpi_tol});
  out.w = out.solve.v;
  out.f = out.w.transpose() * (x * k);
  out.ratio = l21_norm(out.w.transpose() * e, Axis::columns) /
              std::max(projected_mass(out.w, x), hp.eps_guard);
  return out;
}

// ---------------------------------------------------------------------------
// Labels

/// Flips each column so its largest-magnitude entry (first on ties) is
/// positive, then assigns row i to the column holding its largest entry
/// (lowest index on ties).
inline std::vector<int> labels_from_indicator(const Matrix& g) {
  Matrix aligned = g;
  for (Eigen::Index j = 0; j < g.cols(); ++j) {
    Eigen::Index arg = 0;
    g.col(j).cwiseAbs().maxCoeff(&arg);
    if (g(arg, j) < 0.0) aligned.col(j) *= -1.0;
  }
  std::vector<int> labels(static_cast<std::size_t>(g.rows()));
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index j = 1; j < g.cols(); ++j)
      if (aligned(i, j) > aligned(i, best)) best = j;
    labels[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return labels;
}

inline std::vector<int> extract_labels(const Matrix& g, const Hyperparams& hp) {
  if (hp.label_rule == LabelRule::row_argmax) return labels_from_indicator(g);
  return kmeans(g.transpose(), hp.clusters, KmeansOptions{mix_seed(hp.seed, 7), 300, 10}).labels;
}

// ---------------------------------------------------------------------------
// Driver

struct TraceRow {
  int iteration = 0;
  double objective = 0.0;
  double relative_delta = 0.0;  // NaN on the first sweep
  double w_orthogonality = 0.0;
  double g_orthogonality = 0.0;
};

struct FitResult {
  ModelState final;
  std::vector<int> labels;
  std::vector<TraceRow> trace;
  ObjectiveParts parts;
  bool converged = false;
  int components_found = 0;
  int iterations_used = 0;
  int degenerate_g_steps = 0;
  int degenerate_w_steps = 0;
  std::vector<double> xi_trace;  // incoming ratio of every W step
};

/// Optional warm starts; missing pieces are drawn from the seed.
struct FitInit {
  std::optional<Matrix> w;
  std::optional<Matrix> g;
};

namespace detail {
inline void require_finite(const Matrix& m, const char* update) {
  if (!m.allFinite())
    throw NumericalError(std::string("fit: ") + update + " produced non-finite values");
}
}  // namespace detail

inline FitResult fit(const Matrix& data, const Hyperparams& hp, const FitInit& init = {}) {
  if (!data.allFinite()) throw std::invalid_argument("fit: data contains non-finite values");
  const Eigen::Index d = data.rows(), n = data.cols();
  validate(hp, d, n);
  const Matrix x = center_columns(data);
  if (x.cwiseAbs().maxCoeff() == 0.0)
    throw std::invalid_argument("fit: all samples are identical; nothing to separate");

  ModelState st;
  st.w = init.w ? *init.w : random_orthonormal(d, hp.dim, mix_seed(hp.seed, 1));
  st.g = init.g ? *init.g : random_orthonormal(n, hp.clusters, mix_seed(hp.seed, 2));
  if (st.w.rows() != d || st.w.cols() != hp.dim || st.g.rows() != n || st.g.cols() != hp.clusters)
    throw std::invalid_argument("fit: warm start has the wrong shape");
  st.d = Vector::Constant(n, 0.5);
  st.f = update_f(st, x);
  {
    const Matrix d2 = pairwise_sq_dists(x);
    st.gamma = select_bandwidths(d2, hp.knn);
    st.s = similarity_closed_form(d2, st.gamma);
  }

  FitResult res;
  double previous = 0.0;
  for (int t = 1; t <= hp.max_outer_iters; ++t) {
    st.d = residual_weights(st, x, hp.eps_guard);
    st.f = update_f(st, x);
    detail::require_finite(st.f, "update_F");

    GUpdate gu = update_g(st, x, hp);
    detail::require_finite(gu.g, "update_G");
    res.degenerate_g_steps += gu.degenerate ? 1 : 0;
    st.g = std::move(gu.g);

    // Bandwidths are chosen once, from the first indicator-space distances,
    // and then held so that J stays one fixed function across sweeps.
    SUpdate su = update_s(st, hp, t == 1 ? BandwidthPolicy::reselect : BandwidthPolicy::keep);
    detail::require_finite(su.s, "update_S");
    st.s = std::move(su.s);
    st.gamma = std::move(su.gamma);

    WUpdate wu = update_w(st, x, hp);
    detail::require_finite(wu.w, "update_W");
    detail::require_finite(wu.f, "update_W");
    res.degenerate_w_steps += wu.solve.stationary ? 1 : 0;
    res.xi_trace.push_back(wu.xi);
    st.w = std::move(wu.w);
    st.f = std::move(wu.f);

    const double j = objective(st, x, hp);
    if (!std::isfinite(j)) throw NumericalError("fit: objective became non-finite at sweep " + std::to_string(t));
    TraceRow row{t, j, std::numeric_limits<double>::quiet_NaN(), orthogonality_residual(st.w),
                 orthogonality_residual(st.g)};
    if (t > 1) row.relative_delta = std::abs(previous - j) / std::max(std::abs(previous), hp.eps_guard);
    res.trace.push_back(row);
    res.iterations_used = t;
    previous = j;
    if (t > 1 && row.relative_delta <= hp.eps_converge) {
      res.converged = true;
      break;
    }
  }

  res.parts = objective_parts(st, x, hp);
  res.labels = extract_labels(st.g, hp);
  res.components_found = connected_components(st.s, hp.component_threshold);
  res.final = std::move(st);
  return res;
}

}  // namespace rudp
