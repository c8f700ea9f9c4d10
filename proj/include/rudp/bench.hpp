#pragma once

// Benchmark cells: one (method, sweep point, repeat) triple each. A cell is a
// pure function of its description, the data source and the base
// hyperparameters, so re-running it reproduces the same metrics bit for bit.

#include "rudp/config.hpp"
#include "rudp/data.hpp"
#include "rudp/metrics.hpp"
#include "rudp/projection.hpp"

#include <atomic>
#include <chrono>
#include <ostream>
#include <thread>

namespace rudp {

enum class Method { rudp, kmeans_raw, pca_kmeans };

inline std::string method_name(Method m) {
  switch (m) {
    case Method::rudp: return "rudp";
    case Method::kmeans_raw: return "kmeans";
    case Method::pca_kmeans: return "pca_kmeans";
  }
  return "?";
}

inline std::optional<Method> parse_method(const std::string& s) {
  if (s == "rudp") return Method::rudp;
  if (s == "kmeans") return Method::kmeans_raw;
  if (s == "pca_kmeans" || s == "pca") return Method::pca_kmeans;
  return std::nullopt;
}

/// Where cell data comes from. A loaded CSV (with truth) is shared by every
/// repeat; otherwise each repeat draws a fresh synthetic dataset from its seed.
struct DataSource {
  std::optional<Dataset> loaded;
  SynthSpec synth;
  bool standardize = true;
};

struct Cell {
  Method method = Method::rudp;
  int dim = 5;
  double outlier_frac = 0.0;
  std::optional<double> snr_db;
  std::optional<double> lambda;  // rudp only
  std::optional<double> beta;    // rudp only
  int repeat = 0;
  std::uint64_t seed = 0;        // already includes the repeat offset
};

struct CellOutcome {
  Cell cell;
  bool ok = false;
  std::string error;
  double acc = 0.0, nmi = 0.0, pur = 0.0, ari = 0.0;
  int iterations = 0;
  double objective = std::numeric_limits<double>::quiet_NaN();
  double seconds = 0.0;
};

/// Standardize (optional), then outliers, then SNR noise, each seeded from the cell seed.
inline Dataset cell_dataset(const DataSource& src, const Cell& cell) {
  Dataset ds;
  if (src.loaded) {
    ds = *src.loaded;
  } else {
    SynthSpec spec = src.synth;
    spec.seed = cell.seed;
    ds = synth_clusters(spec);
  }
  if (!ds.truth) throw std::invalid_argument("benchmark: dataset has no ground-truth labels");
  if (src.standardize) ds = standardize(std::move(ds));
  if (cell.outlier_frac > 0.0) {
    CorruptionSpec spec;
    spec.kind = CorruptionSpec::Kind::outlier;
    spec.fraction = cell.outlier_frac;
    spec.seed = mix_seed(cell.seed, 101);
    ds = corrupt(std::move(ds), spec);
  }
  if (cell.snr_db) ds = inject_noise_snr(std::move(ds), *cell.snr_db, mix_seed(cell.seed, 102));
  return ds;
}

inline CellOutcome run_cell(const DataSource& src, const Hyperparams& base, const Cell& cell) {
  CellOutcome out;
  out.cell = cell;
  const auto start = std::chrono::steady_clock::now();
  try {
    const Dataset ds = cell_dataset(src, cell);
    std::vector<int> labels;
    const KmeansOptions km{mix_seed(cell.seed, 3), 300, 10};
    switch (cell.method) {
      case Method::rudp: {
        Hyperparams hp = base;
        hp.dim = cell.dim;
        hp.seed = cell.seed;
        if (cell.lambda) hp.lambda = *cell.lambda;
        if (cell.beta) hp.beta = *cell.beta;
        FitResult fr = fit(ds.x, hp);
        labels = std::move(fr.labels);
        out.iterations = fr.iterations_used;
        out.objective = fr.parts.total;
        break;
      }
      case Method::kmeans_raw:
        labels = kmeans(ds.x, base.clusters, km).labels;
        break;
      case Method::pca_kmeans:
        labels = kmeans(pca_project(ds.x, cell.dim).projected, base.clusters, km).labels;
        break;
    }
    const EvalReport r = evaluate(labels, *ds.truth);
    out.acc = r.acc;
    out.nmi = r.nmi;
    out.pur = r.pur;
    out.ari = r.ari;
    out.ok = true;
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

struct Grid {
  std::vector<Method> methods{Method::rudp, Method::kmeans_raw, Method::pca_kmeans};
  std::vector<int> dims{5};
  std::vector<double> outlier_fracs{0.0};
  std::vector<std::optional<double>> snrs{std::nullopt};
  std::vector<double> lambdas{0.1};
  std::vector<double> betas{0.1};
  int repeats = 10;
  std::uint64_t seed = 0;
};

/// Cross product of the sweeps. Baselines ignore lambda and beta, so they get
/// one cell per remaining sweep point instead of one per grid pair.
inline std::vector<Cell> expand(const Grid& g) {
  if (g.repeats < 1) throw std::invalid_argument("benchmark: repeats must be positive");
  std::vector<Cell> cells;
  for (Method m : g.methods)
    for (int dim : g.dims)
      for (double of : g.outlier_fracs)
        for (const auto& snr : g.snrs) {
          std::vector<std::pair<std::optional<double>, std::optional<double>>> pairs;
          if (m == Method::rudp) {
            for (double l : g.lambdas)
              for (double b : g.betas) pairs.emplace_back(l, b);
          } else {
            pairs.emplace_back(std::nullopt, std::nullopt);
          }
          for (const auto& [l, b] : pairs)
            for (int r = 0; r < g.repeats; ++r)
              cells.push_back(Cell{m, dim, of, snr, l, b, r, g.seed + static_cast<std::uint64_t>(r)});
        }
  return cells;
}

/// Runs cells on up to `workers` threads. Each worker writes only its own
/// result slots, so the output order equals the input order.
inline std::vector<CellOutcome> run_cells(const DataSource& src, const Hyperparams& base,
                                          const std::vector<Cell>& cells, int workers) {
  std::vector<CellOutcome> out(cells.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k = next++; k < cells.size(); k = next++) out[k] = run_cell(src, base, cells[k]);
  };
  const int threads = std::max(1, std::min<int>(workers, static_cast<int>(cells.size())));
  if (threads == 1) {
    work();
    return out;
  }
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  return out;
}

namespace detail {
inline std::string opt_cell(const std::optional<double>& v) { return v ? format_double(*v) : ""; }
}  // namespace detail

inline void write_results_csv(std::ostream& out, const std::vector<CellOutcome>& rows, const KeyValues& config) {
  write_key_values(out, config, "# ");
  out << "method,dim,outlier_frac,snr_db,lambda,beta,repeat,seed,status,acc,nmi,pur,ari,iterations,objective,"
         "runtime_s,error\n";
  for (const auto& r : rows) {
    std::string err = r.error;
    for (char& ch : err)
      if (ch == ',' || ch == '\n') ch = ';';
    out << method_name(r.cell.method) << ',' << r.cell.dim << ',' << detail::format_double(r.cell.outlier_frac)
        << ',' << detail::opt_cell(r.cell.snr_db) << ',' << detail::opt_cell(r.cell.lambda) << ','
        << detail::opt_cell(r.cell.beta) << ',' << r.cell.repeat << ',' << r.cell.seed << ','
        << (r.ok ? "ok" : "error") << ',';
    if (r.ok)
      out << detail::format_double(r.acc) << ',' << detail::format_double(r.nmi) << ','
          << detail::format_double(r.pur) << ',' << detail::format_double(r.ari) << ',';
    else
      out << ",,,,";
    out << r.iterations << ',' << (std::isnan(r.objective) ? "" : detail::format_double(r.objective)) << ','
        << detail::format_double(r.seconds) << ',' << err << '\n';
  }
}

struct SummaryRow {
  Cell point;  // repeat and seed are meaningless here
  int ok = 0;
  int failed = 0;
  double acc = 0.0, nmi = 0.0, pur = 0.0, ari = 0.0, seconds = 0.0;  // means over ok cells
};

/// Mean over repeats of every (method, sweep point), in first-appearance order.
inline std::vector<SummaryRow> summarize(const std::vector<CellOutcome>& rows) {
  std::vector<SummaryRow> out;
  auto same = [](const Cell& a, const Cell& b) {
    return a.method == b.method && a.dim == b.dim && a.outlier_frac == b.outlier_frac && a.snr_db == b.snr_db &&
           a.lambda == b.lambda && a.beta == b.beta;
  };
  for (const auto& r : rows) {
    auto it = std::find_if(out.begin(), out.end(), [&](const SummaryRow& s) { return same(s.point, r.cell); });
    if (it == out.end()) {
      out.push_back(SummaryRow{r.cell});
      it = out.end() - 1;
    }
    if (!r.ok) {
      ++it->failed;
      continue;
    }
    ++it->ok;
    it->acc += r.acc;
    it->nmi += r.nmi;
    it->pur += r.pur;
    it->ari += r.ari;
    it->seconds += r.seconds;
  }
  for (auto& s : out)
    if (s.ok > 0) {
      s.acc /= s.ok;
      s.nmi /= s.ok;
      s.pur /= s.ok;
      s.ari /= s.ok;
      s.seconds /= s.ok;
    }
  return out;
}

inline void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows, const KeyValues& config) {
  write_key_values(out, config, "# ");
  out << "method,dim,outlier_frac,snr_db,lambda,beta,repeats_ok,repeats_failed,acc_mean,nmi_mean,pur_mean,"
         "ari_mean,runtime_s_mean\n";
  for (const auto& s : rows) {
    out << method_name(s.point.method) << ',' << s.point.dim << ',' << detail::format_double(s.point.outlier_frac)
        << ',' << detail::opt_cell(s.point.snr_db) << ',' << detail::opt_cell(s.point.lambda) << ','
        << detail::opt_cell(s.point.beta) << ',' << s.ok << ',' << s.failed << ',';
    if (s.ok > 0)
      out << detail::format_double(s.acc) << ',' << detail::format_double(s.nmi) << ','
          << detail::format_double(s.pur) << ',' << detail::format_double(s.ari) << ','
          << detail::format_double(s.seconds) << '\n';
    else
      out << ",,,,\n";
  }
}

}  // namespace rudp
