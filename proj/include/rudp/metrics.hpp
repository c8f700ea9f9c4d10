#pragma once

// External clustering metrics against ground-truth labels.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rudp {

using CountMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

/// Confusion matrix: rows are the distinct truth classes, columns the distinct
/// predicted clusters, both in increasing id order.
struct Contingency {
  CountMatrix counts;
  std::vector<int> truth_ids;
  std::vector<int> pred_ids;
  std::int64_t total = 0;
};

inline Contingency contingency(std::span<const int> pred, std::span<const int> truth) {
  if (pred.size() != truth.size())
    throw std::invalid_argument("metrics: label lengths differ (" + std::to_string(pred.size()) +
                                " vs " + std::to_string(truth.size()) + ")");
  if (pred.empty()) throw std::invalid_argument("metrics: empty labelling");
  std::map<int, int> ti, pi;
  for (int t : truth) ti.emplace(t, 0);
  for (int p : pred) pi.emplace(p, 0);
  Contingency c;
  for (auto& [id, idx] : ti) {
    idx = static_cast<int>(c.truth_ids.size());
    c.truth_ids.push_back(id);
  }
  for (auto& [id, idx] : pi) {
    idx = static_cast<int>(c.pred_ids.size());
    c.pred_ids.push_back(id);
  }
  c.counts = CountMatrix::Zero(static_cast<Eigen::Index>(ti.size()), static_cast<Eigen::Index>(pi.size()));
  for (std::size_t i = 0; i < pred.size(); ++i) ++c.counts(ti[truth[i]], pi[pred[i]]);
  c.total = static_cast<std::int64_t>(pred.size());
  return c;
}

/// Maximum-weight one-to-one matching on a non-negative weight matrix
/// (rows matched to distinct columns, rectangular allowed). Returns, for each
/// row, its column or -1. Shortest augmenting paths with potentials, O(r^2 c).
inline std::vector<int> max_weight_assignment(const CountMatrix& weight) {
  const bool transpose = weight.rows() > weight.cols();
  const CountMatrix w = transpose ? CountMatrix(weight.transpose()) : weight;
  const int n = static_cast<int>(w.rows()), m = static_cast<int>(w.cols());
  // Minimize cost = -weight; 1-based arrays with a virtual column 0.
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<int> match(m + 1, 0), way(m + 1, 0);
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = match[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = -static_cast<double>(w(i0 - 1, j - 1)) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(static_cast<std::size_t>(n), -1);
  for (int j = 1; j <= m; ++j)
    if (match[j] != 0) row_to_col[match[j] - 1] = j - 1;
  if (!transpose) return row_to_col;
  std::vector<int> out(static_cast<std::size_t>(weight.rows()), -1);
  for (int i = 0; i < n; ++i)
    if (row_to_col[i] >= 0) out[row_to_col[i]] = i;
  return out;
}

/// Accuracy under the best one-to-one renaming of predicted clusters.
inline double hungarian_accuracy(std::span<const int> pred, std::span<const int> truth) {
  const Contingency c = contingency(pred, truth);
  const auto match = max_weight_assignment(c.counts);
  std::int64_t hit = 0;
  for (std::size_t r = 0; r < match.size(); ++r)
    if (match[r] >= 0) hit += c.counts(static_cast<Eigen::Index>(r), match[r]);
  return static_cast<double>(hit) / static_cast<double>(c.total);
}

namespace detail {
inline double entropy_of(const std::vector<std::int64_t>& counts, double n) {
  double h = 0.0;
  for (auto k : counts)
    if (k > 0) h -= (k / n) * std::log(k / n);
  return h;
}
inline double choose2(double k) { return 0.5 * k * (k - 1.0); }
}  // namespace detail

/// Mutual information over sqrt(H(pred) H(truth)); 0 when either entropy is 0.
inline double nmi(std::span<const int> pred, std::span<const int> truth) {
  const Contingency c = contingency(pred, truth);
  const double n = static_cast<double>(c.total);
  std::vector<std::int64_t> rows(c.counts.rows(), 0), cols(c.counts.cols(), 0);
  for (Eigen::Index i = 0; i < c.counts.rows(); ++i)
    for (Eigen::Index j = 0; j < c.counts.cols(); ++j) {
      rows[i] += c.counts(i, j);
      cols[j] += c.counts(i, j);
    }
  double mi = 0.0;
  for (Eigen::Index i = 0; i < c.counts.rows(); ++i)
    for (Eigen::Index j = 0; j < c.counts.cols(); ++j) {
      const double k = static_cast<double>(c.counts(i, j));
      if (k > 0) mi += (k / n) * std::log(k * n / (static_cast<double>(rows[i]) * cols[j]));
    }
  const double denom = std::sqrt(detail::entropy_of(rows, n) * detail::entropy_of(cols, n));
  if (denom <= 0.0) return 0.0;
  return std::clamp(mi / denom, 0.0, 1.0);
}

/// (1/n) sum over predicted clusters of the largest truth class inside it.
inline double purity(std::span<const int> pred, std::span<const int> truth) {
  const Contingency c = contingency(pred, truth);
  std::int64_t hit = 0;
  for (Eigen::Index j = 0; j < c.counts.cols(); ++j) hit += c.counts.col(j).maxCoeff();
  return static_cast<double>(hit) / static_cast<double>(c.total);
}

/// Adjusted Rand index (Hubert-Arabie). When the expected and maximal indices
/// coincide the partitions are either identical (1) or the index is 0.
inline double ari(std::span<const int> pred, std::span<const int> truth) {
  const Contingency c = contingency(pred, truth);
  double index = 0.0, sum_rows = 0.0, sum_cols = 0.0;
  for (Eigen::Index i = 0; i < c.counts.rows(); ++i) sum_rows += detail::choose2(static_cast<double>(c.counts.row(i).sum()));
  for (Eigen::Index j = 0; j < c.counts.cols(); ++j) sum_cols += detail::choose2(static_cast<double>(c.counts.col(j).sum()));
  for (Eigen::Index i = 0; i < c.counts.rows(); ++i)
    for (Eigen::Index j = 0; j < c.counts.cols(); ++j) index += detail::choose2(static_cast<double>(c.counts(i, j)));
  const double pairs = detail::choose2(static_cast<double>(c.total));
  const double expected = pairs > 0.0 ? sum_rows * sum_cols / pairs : 0.0;
  const double max_index = 0.5 * (sum_rows + sum_cols);
  if (max_index - expected == 0.0) return index == max_index ? 1.0 : 0.0;
  return (index - expected) / (max_index - expected);
}

struct EvalReport {
  double acc = 0.0;
  double nmi = 0.0;
  double pur = 0.0;
  double ari = 0.0;
  Contingency confusion;
};

inline EvalReport evaluate(std::span<const int> pred, std::span<const int> truth) {
  return EvalReport{hungarian_accuracy(pred, truth), nmi(pred, truth), purity(pred, truth),
                    ari(pred, truth), contingency(pred, truth)};
}

}  // namespace rudp
