// rudp: generate | fit | evaluate | benchmark
//
// Every option can also come from a flat `key = value` file given by
// --config; flags given on the command line win over the file.

#include "rudp/rudp.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

namespace fs = std::filesystem;
using namespace rudp;

namespace {

enum Scope : unsigned { kGenerate = 1, kFit = 2, kEvaluate = 4, kBenchmark = 8 };

struct KeySpec {
  const char* name;
  const char* def;  // nullptr: no default
  unsigned scope;
  const char* help;
};

// clang-format off
const KeySpec kKeys[] = {
    {"data", nullptr, kFit | kBenchmark, "input CSV (benchmark: synthetic data when absent)"},
    {"layout", "rows", kFit | kBenchmark, "rows: one sample per line; columns: one sample per column"},
    {"label-col", "none", kFit | kBenchmark, "0-based index of the label column (or line), or none"},
    {"standardize", "on", kFit | kBenchmark, "z-score features before corruption and fitting: on|off"},
    {"lambda", "0.1", kFit | kBenchmark, "graph smoothness weight (benchmark: comma list)"},
    {"beta", "0.1", kFit | kBenchmark, "entropy weight (benchmark: comma list)"},
    {"dim", "5", kFit | kBenchmark, "projected dimension m (benchmark: comma list)"},
    {"clusters", "3", kGenerate | kFit | kBenchmark, "number of clusters c"},
    {"knn", "10", kFit | kBenchmark, "neighbourhood size for the per-sample bandwidths"},
    {"max-iters", "100", kFit | kBenchmark, "outer sweep cap"},
    {"tol", "1e-5", kFit | kBenchmark, "relative objective change that stops the fit"},
    {"label-rule", "kmeans", kFit | kBenchmark, "labels from G: kmeans (rows of G) or argmax"},
    {"seed", "0", kGenerate | kFit | kBenchmark, "master seed (benchmark: repeat r uses seed + r)"},
    {"outlier-frac", "0", kGenerate | kFit | kBenchmark, "fraction of samples scaled by 1.5 (benchmark: comma list)"},
    {"snr-db", "none", kGenerate | kFit | kBenchmark, "additive Gaussian noise at this SNR, or none (benchmark: comma list)"},
    {"repeats", "10", kBenchmark, "seeds per sweep point"},
    {"baselines", "kmeans,pca_kmeans", kBenchmark, "comparison methods: kmeans, pca_kmeans, or none"},
    {"workers", "1", kBenchmark, "concurrent benchmark cells"},
    {"per-class", "30", kGenerate | kBenchmark, "synthetic samples per class"},
    {"samples", "0", kGenerate | kBenchmark, "synthetic total sample count (overrides per-class when > 0)"},
    {"features", "20", kGenerate | kBenchmark, "synthetic feature count d"},
    {"subspace-dim", "5", kGenerate | kBenchmark, "dimension of the subspace holding the class means"},
    {"separation", "6", kGenerate | kBenchmark, "distance between class means"},
    {"sigma", "1", kGenerate | kBenchmark, "isotropic noise standard deviation"},
    {"pred", nullptr, kEvaluate, "predicted labels (index,label)"},
    {"truth", nullptr, kFit | kEvaluate, "true labels (index,label); fit scores against them when given"},
    {"out-dir", ".", kGenerate | kFit | kEvaluate | kBenchmark, "output directory"},
};
// clang-format on

struct Command {
  CLI::App* app = nullptr;
  unsigned scope = 0;
  std::string config_path;
  std::map<std::string, std::string> flags;
  std::map<std::string, CLI::Option*> options;
};

void register_keys(Command& cmd) {
  cmd.app->add_option("--config", cmd.config_path, "key = value file; flags override it");
  for (const auto& k : kKeys) {
    if (!(k.scope & cmd.scope)) continue;
    std::string help = k.help;
    if (k.def) help += std::string(" [") + k.def + "]";
    cmd.options[k.name] = cmd.app->add_option(std::string("--") + k.name, cmd.flags[k.name], help);
  }
}

/// defaults <- config file <- flags
KeyValues resolve(const Command& cmd) {
  KeyValues kv;
  for (const auto& k : kKeys)
    if ((k.scope & cmd.scope) && k.def) kv.set(k.name, k.def);
  if (!cmd.config_path.empty()) {
    const KeyValues file = read_key_values(cmd.config_path);
    for (const auto& [key, value] : file.items()) {
      const KeySpec* spec = nullptr;
      for (const auto& k : kKeys)
        if (key == k.name) spec = &k;
      if (!spec) throw std::invalid_argument("config: unknown key '" + key + "'");
      if (!(spec->scope & cmd.scope)) {
        std::cerr << "warning: config key '" << key << "' does not apply to this command; ignored\n";
        continue;
      }
      kv.set(key, value);
    }
  }
  for (const auto& [name, opt] : cmd.options)
    if (opt->count() > 0) kv.set(name, cmd.flags.at(name));
  return kv;
}

std::string require(const KeyValues& kv, const std::string& key) {
  auto v = kv.get(key);
  if (!v || v->empty()) throw std::invalid_argument("missing required option --" + key);
  return *v;
}

template <class T>
T parse_scalar(const std::string& key, const std::string& text) {
  T v{};
  const char* b = text.data();
  const char* e = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || ptr != e)
    throw std::invalid_argument("--" + key + ": cannot parse '" + text + "'");
  return v;
}

template <class T>
T get(const KeyValues& kv, const std::string& key) {
  return parse_scalar<T>(key, require(kv, key));
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <class T>
std::vector<T> get_list(const KeyValues& kv, const std::string& key) {
  std::vector<T> out;
  for (const auto& item : split_list(require(kv, key))) out.push_back(parse_scalar<T>(key, item));
  if (out.empty()) throw std::invalid_argument("--" + key + ": empty list");
  return out;
}

bool is_none(const std::string& s) { return s.empty() || s == "none"; }

std::optional<double> get_optional_double(const KeyValues& kv, const std::string& key) {
  const auto v = kv.get(key);
  if (!v || is_none(*v)) return std::nullopt;
  return parse_scalar<double>(key, *v);
}

bool get_switch(const KeyValues& kv, const std::string& key) {
  const std::string v = require(kv, key);
  if (v == "on") return true;
  if (v == "off") return false;
  throw std::invalid_argument("--" + key + ": expected on or off, got '" + v + "'");
}

Layout get_layout(const KeyValues& kv) {
  const std::string v = require(kv, "layout");
  if (v == "rows") return Layout::samples_as_rows;
  if (v == "columns") return Layout::samples_as_columns;
  throw std::invalid_argument("--layout: expected rows or columns, got '" + v + "'");
}

std::optional<int> get_label_col(const KeyValues& kv) {
  const std::string v = require(kv, "label-col");
  if (is_none(v)) return std::nullopt;
  return parse_scalar<int>("label-col", v);
}

Hyperparams get_hyperparams(const KeyValues& kv, bool sweep) {
  Hyperparams hp;
  if (!sweep) {
    hp.lambda = get<double>(kv, "lambda");
    hp.beta = get<double>(kv, "beta");
    hp.dim = get<int>(kv, "dim");
  }
  hp.clusters = get<int>(kv, "clusters");
  hp.knn = get<int>(kv, "knn");
  hp.max_outer_iters = get<int>(kv, "max-iters");
  hp.eps_converge = get<double>(kv, "tol");
  hp.seed = get<std::uint64_t>(kv, "seed");
  const std::string rule = require(kv, "label-rule");
  if (rule == "kmeans")
    hp.label_rule = LabelRule::kmeans_rows;
  else if (rule == "argmax")
    hp.label_rule = LabelRule::row_argmax;
  else
    throw std::invalid_argument("--label-rule: expected kmeans or argmax, got '" + rule + "'");
  return hp;
}

SynthSpec get_synth(const KeyValues& kv) {
  SynthSpec s;
  s.classes = get<int>(kv, "clusters");
  s.per_class = get<int>(kv, "per-class");
  s.samples = get<int>(kv, "samples");
  s.features = get<int>(kv, "features");
  s.subspace_dim = get<int>(kv, "subspace-dim");
  s.separation = get<double>(kv, "separation");
  s.sigma = get<double>(kv, "sigma");
  s.seed = get<std::uint64_t>(kv, "seed");
  return s;
}

fs::path out_dir(const KeyValues& kv) {
  fs::path dir = require(kv, "out-dir");
  fs::create_directories(dir);
  return dir;
}

std::vector<std::string> comment_lines(const KeyValues& kv) {
  std::vector<std::string> lines;
  for (const auto& [k, v] : kv.items()) lines.push_back(k + " = " + v);
  return lines;
}

void write_text(const fs::path& path, const KeyValues& kv) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  write_key_values(out, kv);
  if (!out) throw std::runtime_error("failed while writing '" + path.string() + "'");
}

/// Applies --outlier-frac and --snr-db with seeds derived from --seed.
Dataset apply_corruption(Dataset ds, const KeyValues& kv) {
  const std::uint64_t seed = get<std::uint64_t>(kv, "seed");
  const double frac = get<double>(kv, "outlier-frac");
  if (frac > 0.0) {
    CorruptionSpec spec;
    spec.fraction = frac;
    spec.seed = mix_seed(seed, 101);
    ds = corrupt(std::move(ds), spec);
  }
  if (auto snr = get_optional_double(kv, "snr-db")) ds = inject_noise_snr(std::move(ds), *snr, mix_seed(seed, 102));
  return ds;
}

// ---------------------------------------------------------------------------

int cmd_generate(const KeyValues& kv) {
  const fs::path dir = out_dir(kv);
  Dataset ds = apply_corruption(synth_clusters(get_synth(kv)), kv);
  const auto comments = comment_lines(kv);
  Dataset features = ds;
  features.truth.reset();
  save_csv((dir / "data.csv").string(), features, comments);
  write_labels((dir / "truth.csv").string(), *ds.truth, comments);

  KeyValues prov = kv;
  for (const auto& [k, v] : ds.provenance) prov.set("provenance." + k, v);
  std::string idx;
  for (auto i : ds.corrupted) idx += (idx.empty() ? "" : " ") + std::to_string(i);
  prov.set("corrupted_indices", idx);
  write_text(dir / "provenance.txt", prov);
  std::cout << "wrote " << ds.x.cols() << " samples x " << ds.x.rows() << " features to " << dir.string() << "\n";
  return 0;
}

int cmd_fit(const KeyValues& kv) {
  const Hyperparams hp = get_hyperparams(kv, false);
  Dataset ds = load_csv(require(kv, "data"), get_layout(kv), get_label_col(kv));
  if (auto path = kv.get("truth"); path && !path->empty()) {
    if (ds.truth) throw std::invalid_argument("give either --label-col or --truth, not both");
    ds.truth = read_labels(*path);
    if (static_cast<Eigen::Index>(ds.truth->size()) != ds.x.cols())
      throw std::invalid_argument("--truth has " + std::to_string(ds.truth->size()) + " labels for " +
                                  std::to_string(ds.x.cols()) + " samples");
  }
  if (get_switch(kv, "standardize")) ds = standardize(std::move(ds));
  for (const auto& w : ds.warnings) std::cerr << "warning: " << w << "\n";
  ds = apply_corruption(std::move(ds), kv);
  const fs::path dir = out_dir(kv);

  const FitResult fr = fit(ds.x, hp);
  const auto comments = comment_lines(kv);
  write_labels((dir / "labels.csv").string(), fr.labels, comments);
  {
    std::ofstream out(dir / "trace.csv");
    if (!out) throw std::runtime_error("cannot write trace.csv");
    write_key_values(out, kv, "# ");
    out << "iteration,objective,relative_delta,w_orthogonality,g_orthogonality\n";
    for (const auto& r : fr.trace)
      out << r.iteration << ',' << detail::format_double(r.objective) << ','
          << (std::isnan(r.relative_delta) ? "" : detail::format_double(r.relative_delta)) << ','
          << detail::format_double(r.w_orthogonality) << ',' << detail::format_double(r.g_orthogonality) << '\n';
  }
  double worst_increase = 0.0;
  for (std::size_t t = 1; t < fr.trace.size(); ++t)
    worst_increase = std::max(worst_increase, fr.trace[t].objective - fr.trace[t - 1].objective);

  KeyValues summary = kv;
  summary.set("samples", std::to_string(ds.x.cols()));
  summary.set("features", std::to_string(ds.x.rows()));
  summary.set("objective", detail::format_double(fr.parts.total));
  summary.set("objective.ratio", detail::format_double(fr.parts.ratio));
  summary.set("objective.smoothness", detail::format_double(fr.parts.smoothness));
  summary.set("objective.entropy", detail::format_double(fr.parts.entropy));
  summary.set("iterations", std::to_string(fr.iterations_used));
  summary.set("converged", fr.converged ? "true" : "false");
  summary.set("components_found", std::to_string(fr.components_found));
  summary.set("degenerate_g_steps", std::to_string(fr.degenerate_g_steps));
  summary.set("degenerate_w_steps", std::to_string(fr.degenerate_w_steps));
  summary.set("max_objective_increase", detail::format_double(worst_increase));
  if (ds.truth) {
    const EvalReport r = evaluate(fr.labels, *ds.truth);
    summary.set("acc", detail::format_double(r.acc));
    summary.set("nmi", detail::format_double(r.nmi));
    summary.set("pur", detail::format_double(r.pur));
    summary.set("ari", detail::format_double(r.ari));
  }
  write_text(dir / "summary.txt", summary);
  std::cout << "objective " << fr.parts.total << " after " << fr.iterations_used << " sweeps"
            << (fr.converged ? " (converged)" : " (iteration cap)") << "\n";
  return 0;
}

int cmd_evaluate(const KeyValues& kv) {
  const auto pred = read_labels(require(kv, "pred"));
  const auto truth = read_labels(require(kv, "truth"));
  const EvalReport r = evaluate(pred, truth);
  const fs::path dir = out_dir(kv);
  KeyValues report = kv;
  report.set("samples", std::to_string(truth.size()));
  report.set("acc", detail::format_double(r.acc));
  report.set("nmi", detail::format_double(r.nmi));
  report.set("pur", detail::format_double(r.pur));
  report.set("ari", detail::format_double(r.ari));
  write_text(dir / "report.txt", report);

  std::ofstream out(dir / "confusion.csv");
  if (!out) throw std::runtime_error("cannot write confusion.csv");
  write_key_values(out, kv, "# ");
  out << "truth";
  for (int p : r.confusion.pred_ids) out << ",pred_" << p;
  out << '\n';
  for (std::size_t i = 0; i < r.confusion.truth_ids.size(); ++i) {
    out << r.confusion.truth_ids[i];
    for (Eigen::Index j = 0; j < r.confusion.counts.cols(); ++j)
      out << ',' << r.confusion.counts(static_cast<Eigen::Index>(i), j);
    out << '\n';
  }
  std::cout << "acc " << r.acc << "  nmi " << r.nmi << "  pur " << r.pur << "  ari " << r.ari << "\n";
  return 0;
}

int cmd_benchmark(const KeyValues& kv) {
  const Hyperparams base = get_hyperparams(kv, true);
  DataSource src;
  src.standardize = get_switch(kv, "standardize");
  if (auto path = kv.get("data"); path && !path->empty()) {
    src.loaded = load_csv(*path, get_layout(kv), get_label_col(kv));
    if (!src.loaded->truth) throw std::invalid_argument("benchmark needs ground truth; set --label-col");
  } else {
    src.synth = get_synth(kv);
  }

  Grid grid;
  grid.methods = {Method::rudp};
  const std::string bl = require(kv, "baselines");
  if (!is_none(bl))
    for (const auto& name : split_list(bl)) {
      const auto m = parse_method(name);
      if (!m || *m == Method::rudp) throw std::invalid_argument("--baselines: unknown baseline '" + name + "'");
      grid.methods.push_back(*m);
    }
  grid.dims = get_list<int>(kv, "dim");
  grid.outlier_fracs = get_list<double>(kv, "outlier-frac");
  grid.snrs.clear();
  for (const auto& item : split_list(require(kv, "snr-db")))
    grid.snrs.push_back(is_none(item) ? std::nullopt : std::optional<double>(parse_scalar<double>("snr-db", item)));
  if (grid.snrs.empty()) grid.snrs.push_back(std::nullopt);
  grid.lambdas = get_list<double>(kv, "lambda");
  grid.betas = get_list<double>(kv, "beta");
  grid.repeats = get<int>(kv, "repeats");
  grid.seed = base.seed;
  const int workers = get<int>(kv, "workers");
  if (workers < 1) throw std::invalid_argument("--workers must be positive");

  const fs::path dir = out_dir(kv);
  const auto cells = expand(grid);
  std::cerr << "running " << cells.size() << " cells on " << workers << " worker(s)\n";
  const auto rows = run_cells(src, base, cells, workers);

  write_text(dir / "config.txt", kv);
  {
    std::ofstream out(dir / "results.csv");
    if (!out) throw std::runtime_error("cannot write results.csv");
    write_results_csv(out, rows, kv);
  }
  {
    std::ofstream out(dir / "summary.csv");
    if (!out) throw std::runtime_error("cannot write summary.csv");
    write_summary_csv(out, summarize(rows), kv);
  }
  int failed = 0;
  for (const auto& r : rows)
    if (!r.ok) {
      ++failed;
      std::cerr << "cell failed (" << method_name(r.cell.method) << ", seed " << r.cell.seed << "): " << r.error
                << "\n";
    }
  std::cout << rows.size() - failed << "/" << rows.size() << " cells ok; results in " << dir.string() << "\n";
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust unsupervised discriminative projection"};
  app.require_subcommand(1);
  Command gen{app.add_subcommand("generate", "write a synthetic dataset"), kGenerate};
  Command fit_cmd{app.add_subcommand("fit", "fit the projection and cluster a CSV dataset"), kFit};
  Command eval{app.add_subcommand("evaluate", "score predicted labels against the truth"), kEvaluate};
  Command bench{app.add_subcommand("benchmark", "sweep methods, dimensions, corruption and seeds"), kBenchmark};
  for (Command* c : {&gen, &fit_cmd, &eval, &bench}) register_keys(*c);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*gen.app) return cmd_generate(resolve(gen));
    if (*fit_cmd.app) return cmd_fit(resolve(fit_cmd));
    if (*eval.app) return cmd_evaluate(resolve(eval));
    if (*bench.app) return cmd_benchmark(resolve(bench));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
