#pragma once

// Dataset ingestion, preprocessing, synthetic generation and corruption.

#include "rudp/matrix.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string_view>
#include <utility>

namespace rudp {

enum class Layout { samples_as_rows, samples_as_columns };

struct Dataset {
  Matrix x;                                // d x n
  std::optional<std::vector<int>> truth;  // n labels
  std::vector<std::string> label_names;    // set when labels were non-numeric tokens
  std::vector<std::string> feature_names;
  std::vector<std::pair<std::string, std::string>> provenance;
  std::vector<Eigen::Index> corrupted;     // indices touched by the last corruption
  std::vector<std::string> warnings;

  void note(std::string key, std::string value) {
    provenance.emplace_back(std::move(key), std::move(value));
  }
};

class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// CSV

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::optional<double> parse_number(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string_view rest(line);
  while (true) {
    const auto pos = rest.find(',');
    cells.emplace_back(trim(rest.substr(0, pos)));
    if (pos == std::string_view::npos) break;
    rest.remove_prefix(pos + 1);
  }
  return cells;
}

inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

/// Integer labels are kept as-is; any other token set is numbered in order of
/// first appearance.
inline std::vector<int> encode_labels(const std::vector<std::string>& tokens,
                                      std::vector<std::string>& names) {
  std::vector<int> out;
  out.reserve(tokens.size());
  bool integral = true;
  for (const auto& t : tokens) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size()) {
      integral = false;
      break;
    }
    out.push_back(v);
  }
  if (integral) return out;
  out.clear();
  std::map<std::string, int> ids;
  for (const auto& t : tokens) {
    auto [it, inserted] = ids.emplace(t, static_cast<int>(names.size()));
    if (inserted) names.push_back(t);
    out.push_back(it->second);
  }
  return out;
}

}  // namespace detail

/// Reads a numeric CSV (comma separated, optional single header line; lines
/// starting with '#' are comments).
/// `label_column` is a 0-based column (samples_as_rows) or line
/// (samples_as_columns) index holding class labels; it is excluded from X.
inline Dataset load_csv(const std::string& path, Layout layout,
                        std::optional<int> label_column = std::nullopt) {
  std::ifstream in(path);
  if (!in) throw CsvError("cannot open '" + path + "'");
  std::vector<std::vector<std::string>> lines;
  std::vector<std::size_t> line_no;  // physical line of each kept line
  std::string line;
  for (std::size_t k = 1; std::getline(in, line); ++k) {
    const auto t = detail::trim(line);
    if (t.empty() || t.front() == '#') continue;
    lines.push_back(detail::split_line(line));
    line_no.push_back(k);
  }
  if (lines.empty()) throw CsvError("'" + path + "' is empty");

  const std::size_t width = lines.front().size();
  for (std::size_t r = 0; r < lines.size(); ++r)
    if (lines[r].size() != width)
      throw CsvError("'" + path + "' line " + std::to_string(line_no[r]) + ": expected " +
                     std::to_string(width) + " fields, found " + std::to_string(lines[r].size()));

  // A first line with any non-numeric cell outside the label column is a header.
  std::vector<std::string> header;
  {
    bool numeric = true;
    for (std::size_t c = 0; c < width; ++c) {
      const bool label_cell = layout == Layout::samples_as_rows && label_column &&
                              static_cast<std::size_t>(*label_column) == c;
      if (!label_cell && !detail::parse_number(lines.front()[c])) numeric = false;
    }
    if (!numeric) {
      header = lines.front();
      lines.erase(lines.begin());
      line_no.erase(line_no.begin());
    }
  }
  if (lines.empty()) throw CsvError("'" + path + "' has a header but no data");

  const std::size_t rows = lines.size();
  if (label_column) {
    const std::size_t limit = layout == Layout::samples_as_rows ? width : rows;
    if (*label_column < 0 || static_cast<std::size_t>(*label_column) >= limit)
      throw CsvError("label index " + std::to_string(*label_column) + " out of range");
  }
  auto cell_value = [&](std::size_t r, std::size_t c) {
    auto v = detail::parse_number(lines[r][c]);
    if (!v)
      throw CsvError("'" + path + "' line " + std::to_string(line_no[r]) + ", column " +
                     std::to_string(c + 1) + ": non-numeric value '" + lines[r][c] + "'");
    return *v;
  };

  Dataset ds;
  std::vector<std::string> label_tokens;
  if (layout == Layout::samples_as_rows) {
    const Eigen::Index d = static_cast<Eigen::Index>(width - (label_column ? 1 : 0));
    ds.x.resize(d, static_cast<Eigen::Index>(rows));
    for (std::size_t r = 0; r < rows; ++r) {
      Eigen::Index f = 0;
      for (std::size_t c = 0; c < width; ++c) {
        if (label_column && static_cast<std::size_t>(*label_column) == c) {
          label_tokens.push_back(lines[r][c]);
          continue;
        }
        ds.x(f++, static_cast<Eigen::Index>(r)) = cell_value(r, c);
      }
    }
    for (std::size_t c = 0; c < header.size(); ++c)
      if (!label_column || static_cast<std::size_t>(*label_column) != c) ds.feature_names.push_back(header[c]);
  } else {
    const Eigen::Index d = static_cast<Eigen::Index>(rows - (label_column ? 1 : 0));
    ds.x.resize(d, static_cast<Eigen::Index>(width));
    Eigen::Index f = 0;
    for (std::size_t r = 0; r < rows; ++r) {
      if (label_column && static_cast<std::size_t>(*label_column) == r) {
        label_tokens = lines[r];
        continue;
      }
      for (std::size_t c = 0; c < width; ++c) ds.x(f, static_cast<Eigen::Index>(c)) = cell_value(r, c);
      ++f;
    }
  }
  if (ds.x.rows() == 0) throw CsvError("'" + path + "' has no feature columns");
  if (!ds.x.allFinite()) throw CsvError("'" + path + "' contains non-finite values");
  if (label_column) ds.truth = detail::encode_labels(label_tokens, ds.label_names);
  ds.note("source", path);
  ds.note("layout", layout == Layout::samples_as_rows ? "rows" : "columns");
  return ds;
}

/// Writes X one sample per line (header f0..f{d-1} or the feature names),
/// followed by a `label` column when truth is present. Values use the
/// shortest round-trip representation. `comments` go first, each behind "# ".
inline void save_csv(const std::string& path, const Dataset& ds, const std::vector<std::string>& comments = {}) {
  std::ofstream out(path);
  if (!out) throw CsvError("cannot write '" + path + "'");
  for (const auto& c : comments) out << "# " << c << '\n';
  for (Eigen::Index f = 0; f < ds.x.rows(); ++f) {
    if (f) out << ',';
    out << (static_cast<std::size_t>(f) < ds.feature_names.size() ? ds.feature_names[f]
                                                                  : "f" + std::to_string(f));
  }
  if (ds.truth) out << ",label";
  out << '\n';
  for (Eigen::Index i = 0; i < ds.x.cols(); ++i) {
    for (Eigen::Index f = 0; f < ds.x.rows(); ++f) {
      if (f) out << ',';
      out << detail::format_double(ds.x(f, i));
    }
    if (ds.truth) out << ',' << (*ds.truth)[static_cast<std::size_t>(i)];
    out << '\n';
  }
  if (!out) throw CsvError("failed while writing '" + path + "'");
}

/// `index,label` file.
inline void write_labels(const std::string& path, std::span<const int> labels,
                         const std::vector<std::string>& comments = {}) {
  std::ofstream out(path);
  if (!out) throw CsvError("cannot write '" + path + "'");
  for (const auto& c : comments) out << "# " << c << '\n';
  out << "index,label\n";
  for (std::size_t i = 0; i < labels.size(); ++i) out << i << ',' << labels[i] << '\n';
  if (!out) throw CsvError("failed while writing '" + path + "'");
}

/// Reads an `index,label` file (header optional); rows may appear in any order
/// but the indices must cover 0..n-1 exactly once.
inline std::vector<int> read_labels(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CsvError("cannot open '" + path + "'");
  std::string line;
  std::vector<std::pair<long, int>> rows;
  std::size_t lineno = 0;
  bool header_allowed = true;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = detail::trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto cells = detail::split_line(line);
    if (cells.size() != 2) throw CsvError("'" + path + "' line " + std::to_string(lineno) + ": expected index,label");
    long idx = 0;
    int lab = 0;
    auto r1 = std::from_chars(cells[0].data(), cells[0].data() + cells[0].size(), idx);
    auto r2 = std::from_chars(cells[1].data(), cells[1].data() + cells[1].size(), lab);
    const bool ok = r1.ec == std::errc() && r1.ptr == cells[0].data() + cells[0].size() &&
                    r2.ec == std::errc() && r2.ptr == cells[1].data() + cells[1].size();
    if (!ok) {
      if (header_allowed) {
        header_allowed = false;
        continue;
      }
      throw CsvError("'" + path + "' line " + std::to_string(lineno) + ": malformed label row");
    }
    header_allowed = false;
    rows.emplace_back(idx, lab);
  }
  if (rows.empty()) throw CsvError("'" + path + "' holds no labels");
  std::vector<int> labels(rows.size());
  std::vector<char> seen(rows.size(), 0);
  for (auto [idx, lab] : rows) {
    if (idx < 0 || static_cast<std::size_t>(idx) >= rows.size() || seen[idx])
      throw CsvError("'" + path + "': index " + std::to_string(idx) + " missing, duplicated or out of range");
    seen[idx] = 1;
    labels[idx] = lab;
  }
  return labels;
}

// ---------------------------------------------------------------------------
// Preprocessing

/// Per-feature z-scoring with the population variance. Constant features are
/// set to zero and reported in `warnings`.
inline Dataset standardize(Dataset ds) {
  const double n = static_cast<double>(ds.x.cols());
  for (Eigen::Index f = 0; f < ds.x.rows(); ++f) {
    const double mean = ds.x.row(f).mean();
    ds.x.row(f).array() -= mean;
    const double sd = std::sqrt(ds.x.row(f).squaredNorm() / n);
    if (sd > 0.0 && std::isfinite(sd)) {
      ds.x.row(f) /= sd;
    } else {
      ds.x.row(f).setZero();
      ds.warnings.push_back("feature " + std::to_string(f) + " is constant; zeroed");
    }
  }
  ds.note("standardized", "on");
  return ds;
}

// ---------------------------------------------------------------------------
// Synthetic data

struct SynthSpec {
  int classes = 3;
  int per_class = 30;
  int samples = 0;  // when > 0, overrides per_class; classes get sizes differing by at most one
  int features = 20;
  int subspace_dim = 5;
  double separation = 6.0;
  double sigma = 1.0;
  std::uint64_t seed = 0;
};

/// Gaussian clusters. Class means lie in a random subspace_dim-dimensional
/// subspace: on a regular simplex with edge `separation` when
/// subspace_dim >= classes - 1, otherwise equally spaced on a line with that
/// spacing. Every sample adds isotropic N(0, sigma^2) noise in all features.
/// Samples are ordered by class.
inline Dataset synth_clusters(const SynthSpec& spec) {
  if (spec.classes < 1 || (spec.samples <= 0 && spec.per_class < 1) || spec.features < 1 ||
      (spec.samples > 0 && spec.samples < spec.classes))
    throw std::invalid_argument("synth_clusters: sizes must be positive");
  if (spec.subspace_dim < 1 || spec.subspace_dim > spec.features)
    throw std::invalid_argument("synth_clusters: subspace_dim must lie in [1, features]");
  if (!(spec.sigma >= 0.0)) throw std::invalid_argument("synth_clusters: sigma must be >= 0");
  const int c = spec.classes;
  const Matrix basis = random_orthonormal(spec.features, spec.subspace_dim, mix_seed(spec.seed, 0));

  Matrix coords = Matrix::Zero(spec.subspace_dim, c);
  if (c > 1 && spec.subspace_dim >= c - 1) {
    // Centred simplex vertices (sep/sqrt2)(e_k - 1/c), written in an
    // orthonormal basis of the sum-zero hyperplane of R^c.
    const Matrix centering = Matrix::Identity(c, c) - Matrix::Constant(c, c, 1.0 / c);
    const Matrix plane = sym_eig(centering).vectors.leftCols(c - 1);
    const Matrix vertices = (spec.separation / std::sqrt(2.0)) * centering;
    coords.topRows(c - 1) = plane.transpose() * vertices;
  } else if (c > 1) {
    for (int k = 0; k < c; ++k) coords(0, k) = spec.separation * (k - 0.5 * (c - 1));
  }
  const Matrix means = basis * coords;

  std::mt19937_64 rng(mix_seed(spec.seed, 1));
  std::normal_distribution<double> normal(0.0, 1.0);
  Dataset ds;
  const Eigen::Index n = spec.samples > 0 ? spec.samples : static_cast<Eigen::Index>(c) * spec.per_class;
  ds.x.resize(spec.features, n);
  ds.truth = std::vector<int>(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const int k = static_cast<int>(i * c / n);
    (*ds.truth)[static_cast<std::size_t>(i)] = k;
    for (Eigen::Index f = 0; f < spec.features; ++f) ds.x(f, i) = means(f, k) + spec.sigma * normal(rng);
  }
  ds.note("source", "synthetic");
  ds.note("classes", std::to_string(c));
  ds.note("samples", std::to_string(n));
  ds.note("features", std::to_string(spec.features));
  ds.note("subspace_dim", std::to_string(spec.subspace_dim));
  ds.note("separation", detail::format_double(spec.separation));
  ds.note("sigma", detail::format_double(spec.sigma));
  ds.note("seed", std::to_string(spec.seed));
  return ds;
}

/// Windows of `width` consecutive values taken every `stride` values; each
/// window becomes one sample.
inline Dataset sliding_window(std::span<const double> signal, int width, int stride) {
  if (width < 1 || stride < 1) throw std::invalid_argument("sliding_window: width and stride must be positive");
  if (static_cast<std::size_t>(width) > signal.size())
    throw std::invalid_argument("sliding_window: width " + std::to_string(width) + " exceeds signal length " +
                                std::to_string(signal.size()));
  const std::size_t count = (signal.size() - width) / stride + 1;
  Dataset ds;
  ds.x.resize(width, static_cast<Eigen::Index>(count));
  for (std::size_t w = 0; w < count; ++w)
    for (int k = 0; k < width; ++k) ds.x(k, static_cast<Eigen::Index>(w)) = signal[w * stride + k];
  ds.note("source", "sliding_window");
  ds.note("width", std::to_string(width));
  ds.note("stride", std::to_string(stride));
  return ds;
}

// ---------------------------------------------------------------------------
// Corruption

inline constexpr double kOutlierScale = 1.5;

enum class CorruptionScope { samples, entries };

struct CorruptionSpec {
  enum class Kind { outlier, snr_noise } kind = Kind::outlier;
  double fraction = 0.0;  // outlier
  double snr_db = 0.0;    // snr_noise
  CorruptionScope scope = CorruptionScope::samples;
  std::uint64_t seed = 0;
};

/// Multiplies a seeded random round(fraction * count) subset of the samples
/// (or entries) by 1.5. The touched indices (column index, or column-major
/// linear index for entries) are stored sorted in `corrupted`.
inline Dataset inject_outliers(Dataset ds, const CorruptionSpec& spec) {
  if (spec.kind != CorruptionSpec::Kind::outlier) throw std::invalid_argument("inject_outliers: spec is not an outlier spec");
  if (!(spec.fraction >= 0.0 && spec.fraction <= 1.0))
    throw std::invalid_argument("inject_outliers: fraction must lie in [0, 1]");
  const bool whole = spec.scope == CorruptionScope::samples;
  const Eigen::Index pool = whole ? ds.x.cols() : ds.x.size();
  const auto count = static_cast<Eigen::Index>(std::llround(spec.fraction * static_cast<double>(pool)));
  std::vector<Eigen::Index> order(static_cast<std::size_t>(pool));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::mt19937_64 rng(mix_seed(spec.seed, 11));
  // Partial Fisher-Yates with an explicit draw so the subset is library independent.
  for (Eigen::Index k = 0; k < count; ++k) {
    const auto span = static_cast<std::uint64_t>(pool - k);
    const auto pick = k + static_cast<Eigen::Index>(rng() % span);
    std::swap(order[k], order[pick]);
  }
  ds.corrupted.assign(order.begin(), order.begin() + count);
  std::sort(ds.corrupted.begin(), ds.corrupted.end());
  for (Eigen::Index idx : ds.corrupted) {
    if (whole)
      ds.x.col(idx) *= kOutlierScale;
    else
      ds.x.data()[idx] *= kOutlierScale;
  }
  ds.note("outlier_fraction", detail::format_double(spec.fraction));
  ds.note("outlier_scope", whole ? "samples" : "entries");
  ds.note("outlier_count", std::to_string(count));
  ds.note("outlier_seed", std::to_string(spec.seed));
  return ds;
}

/// Adds zero-mean Gaussian noise whose variance is the mean squared entry of X
/// divided by 10^(snr_db/10).
inline Dataset inject_noise_snr(Dataset ds, double snr_db, std::uint64_t seed) {
  const double power = ds.x.squaredNorm() / static_cast<double>(ds.x.size());
  if (!(power > 0.0)) throw std::invalid_argument("inject_noise_snr: signal has zero power");
  if (!std::isfinite(snr_db)) throw std::invalid_argument("inject_noise_snr: snr_db must be finite");
  const double sd = std::sqrt(power / std::pow(10.0, snr_db / 10.0));
  std::mt19937_64 rng(mix_seed(seed, 13));
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index i = 0; i < ds.x.size(); ++i) ds.x.data()[i] += sd * normal(rng);
  ds.note("snr_db", detail::format_double(snr_db));
  ds.note("noise_seed", std::to_string(seed));
  return ds;
}

inline Dataset corrupt(Dataset ds, const CorruptionSpec& spec) {
  if (spec.kind == CorruptionSpec::Kind::outlier) return inject_outliers(std::move(ds), spec);
  return inject_noise_snr(std::move(ds), spec.snr_db, spec.seed);
}

}  // namespace rudp
