// rpfcluster: command-line front end for the rpf-kernel library.
//
//   rpfcluster cluster   --input data.csv --label-col species --k 3
//   rpfcluster kernel    --input data.csv --format coo
//   rpfcluster baseline  --input data.csv --method njw --k 3
//   rpfcluster theory    --trials 100000
//   rpfcluster benchmark --manifest data/benchmark.json --fast-grid
//
// Exit status: 0 success, 2 usage or configuration error, 1 runtime failure.

#include <CLI11.hpp>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include "rpf/benchmark.hpp"
#include "rpf/dataset.hpp"
#include "rpf/kernel.hpp"
#include "rpf/pipeline.hpp"
#include "rpf/report.hpp"
#include "rpf/rpforest.hpp"
#include "rpf/spectral.hpp"
#include "rpf/theory.hpp"

namespace fs = std::filesystem;
using namespace rpf;

namespace {

struct InputOptions {
  std::string path;
  std::string label_col;
  bool no_header = false;
  std::vector<Index> standardize;
  Index max_rows = 2000;
};

struct Loaded {
  DataMatrix data;
  IndexSet rows;  // original row index of each retained row
  Index rows_loaded = 0;
};

ColumnSelector parse_selector(const std::string& s) {
  if (!s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); }))
    return ColumnSelector{static_cast<Index>(std::stoull(s))};
  return ColumnSelector{s};
}

void add_input_options(CLI::App* app, InputOptions& in) {
  app->add_option("--input,-i", in.path, "CSV file")->required();
  app->add_option("--label-col", in.label_col, "reference label column (0-based index or header name)");
  app->add_flag("--no-header", in.no_header, "first row is data");
  app->add_option("--standardize", in.standardize, "feature columns to z-score (0-based, label excluded)");
  app->add_option("--max-rows", in.max_rows, "rows above this are subsampled uniformly");
}

Loaded load_input(const InputOptions& in, std::uint64_t seed) {
  if (!fs::exists(in.path)) throw ConfigError("input not found: " + in.path);
  CsvOptions opt;
  opt.has_header = !in.no_header;
  if (!in.label_col.empty()) opt.label_column = parse_selector(in.label_col);
  Loaded out;
  out.data = load_csv(in.path, opt);
  out.rows_loaded = out.data.rows();
  if (!in.standardize.empty()) out.data = standardize(out.data, in.standardize);
  if (in.max_rows < 1) throw ConfigError("--max-rows must be positive");
  if (out.data.rows() > in.max_rows) {
    out.data = subsample(out.data, in.max_rows, seed, &out.rows);
    std::cerr << "subsampled " << in.max_rows << " of " << out.rows_loaded << " rows (seed " << seed << ")\n";
  } else {
    out.rows.resize(out.data.rows());
    for (Index i = 0; i < out.rows.size(); ++i) out.rows[i] = i;
  }
  return out;
}

Json input_json(const InputOptions& in, const Loaded& l) {
  return Json{{"path", in.path},
              {"rows_loaded", l.rows_loaded},
              {"rows_used", l.data.rows()},
              {"features", l.data.cols()},
              {"classes", l.data.has_labels() ? l.data.num_classes() : 0},
              {"standardized", in.standardize}};
}

fs::path output_dir(const std::string& out) {
  fs::path dir = out.empty() ? fs::path(".") : fs::path(out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
  return dir;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p);
  if (!f) throw Error("cannot write " + p.string());
  return f;
}

void write_assignment(const fs::path& p, const Loaded& l, const std::vector<int>& labels) {
  auto f = open_out(p);
  f << "index,cluster\n";
  for (Index i = 0; i < labels.size(); ++i) f << l.rows[i] << "," << labels[i] << "\n";
}

void write_report(const fs::path& p, const Json& report) {
  auto f = open_out(p);
  f << dump_report(report);
}

std::string percent(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f%%", 100.0 * x);
  return buf;
}

void print_metrics(const MetricReport& m) {
  std::cout << "rho_c = " << percent(m.rho_c) << "  rho_r = " << percent(m.rho_r) << "  (n=" << m.n << ", K=" << m.K
            << ", classes=" << m.l << ")\n";
}

SplitRule rule_from(const std::string& s) { return split_rule_from_string(s); }

// -- cluster ----------------------------------------------------------------

struct ClusterOptions {
  InputOptions in;
  Index k = 2;
  Index trees = 400;
  Index ns = 30;
  std::uint64_t seed = 0;
  std::string split_rule = "uniform";
  double beta1 = 0.0;
  double beta2 = 1.0;
  std::string variant = "ncut";
  std::string selection = "best";
  bool literal_exp = false;
  bool tune = false;
  bool oracle_tune = false;
  bool fast_grid = false;
  std::string export_kernel;
  bool eigenvector = false;
  bool include_cells = false;
  std::string out;
};

int cmd_cluster(const ClusterOptions& o) {
  const Loaded l = load_input(o.in, o.seed);
  PipelineConfig cfg;
  cfg.K = o.k;
  cfg.forest.trees = o.trees;
  cfg.forest.leaf_size = o.ns;
  cfg.forest.seed = o.seed;
  cfg.forest.split_rule = rule_from(o.split_rule);
  cfg.beta1 = o.beta1;
  cfg.beta2 = o.beta2;
  cfg.variant = spectral_variant_from_string(o.variant);
  if (o.selection == "best")
    cfg.split_selection = SplitSelection::BestNcut;
  else if (o.selection == "largest")
    cfg.split_selection = SplitSelection::Largest;
  else
    throw ConfigError("unknown split selection '" + o.selection + "' (expected best or largest)");
  cfg.literal_exp = o.literal_exp;
  cfg.njw_kmeans.seed = o.seed;
  cfg.validate();
  if (!o.export_kernel.empty() && o.export_kernel != "dense" && o.export_kernel != "coo")
    throw ConfigError("--export-kernel must be dense or coo");
  const fs::path dir = output_dir(o.out);

  Json report = make_report("cluster");
  report["deterministic"]["input"] = input_json(o.in, l);
  std::optional<TunedRun> tuned;
  std::optional<ClusterRun> plain;
  if (o.tune || o.oracle_tune) {
    const TuneGrid grid = o.fast_grid ? TuneGrid::fast() : TuneGrid::full();
    tuned = rpf_cluster_tuned(l.data, cfg, grid, o.oracle_tune ? TuneCriterion::Oracle : TuneCriterion::Eigengap);
    cfg.beta1 = tuned->tuning.beta1;
    cfg.beta2 = tuned->tuning.beta2;
    add_cluster_run(report, cfg, tuned->run, &tuned->tuning);
    if (o.include_cells) report["deterministic"]["tuning"] = to_json(tuned->tuning, true);
  } else {
    plain = rpf_cluster(l.data, cfg);
    add_cluster_run(report, cfg, *plain);
  }
  const ClusterRun& run = tuned ? tuned->run : *plain;

  write_assignment(dir / "assignment.csv", l, run.assignment.labels);
  if (o.export_kernel == "dense") {
    auto f = open_out(dir / "kernel.csv");
    write_kernel_csv(f, run.kernel);
  } else if (o.export_kernel == "coo") {
    auto f = open_out(dir / "kernel.coo");
    write_kernel_coo(f, run.kernel);
  }
  if (o.eigenvector) {
    // root split of the processed affinity
    const SimilarityMatrix affinity = rescale_kernel(threshold_kernel(run.kernel, cfg.beta1), cfg.beta2, cfg.literal_exp);
    const Bipartition b = fiedler_bipartition(affinity);
    auto f = open_out(dir / "eigenvector.csv");
    f << "index,y,u\n" << std::setprecision(17);
    for (Index i = 0; i < l.data.rows(); ++i)
      f << l.rows[i] << "," << b.eigenvector(i) << "," << b.normalized_eigenvector(i) << "\n";
    report["deterministic"]["root_split"] = Json{{"eigenvalue", b.eigenvalue},
                                                 {"residual", b.residual},
                                                 {"disconnected", b.disconnected},
                                                 {"fallback", b.fallback}};
  }
  write_report(dir / "report.json", report);

  std::cout << "clustered " << l.data.rows() << " points into " << run.assignment.K << " clusters";
  if (tuned) std::cout << " (beta1=" << cfg.beta1 << ", beta2=" << cfg.beta2 << ")";
  std::cout << "\n";
  if (run.diagnostics.metrics) print_metrics(*run.diagnostics.metrics);
  std::cout << "wrote " << (dir / "report.json").string() << "\n";
  return 0;
}

// -- kernel -----------------------------------------------------------------

struct KernelOptions {
  InputOptions in;
  Index trees = 400;
  Index ns = 30;
  std::uint64_t seed = 0;
  std::string split_rule = "uniform";
  std::string format = "dense";
  bool sparse = false;
  bool psd = false;
  std::string save_forest;
  std::string load_forest;
  std::string out;
};

int cmd_kernel(const KernelOptions& o) {
  const Loaded l = load_input(o.in, o.seed);
  if (o.format != "dense" && o.format != "coo") throw ConfigError("--format must be dense or coo");
  if (o.sparse && o.format == "dense") throw ConfigError("--sparse needs --format coo");
  const fs::path dir = output_dir(o.out);

  RpForest forest;
  if (!o.load_forest.empty()) {
    std::ifstream f(o.load_forest);
    if (!f) throw ConfigError("forest file not found: " + o.load_forest);
    forest = load_forest(f);
    if (forest.n != l.data.rows())
      throw ConfigError("forest was grown on " + std::to_string(forest.n) + " points, input has " +
                        std::to_string(l.data.rows()));
  } else {
    ForestParams fp;
    fp.trees = o.trees;
    fp.leaf_size = o.ns;
    fp.seed = o.seed;
    fp.split_rule = rule_from(o.split_rule);
    forest = grow_forest(l.data, fp);
  }
  if (!o.save_forest.empty()) {
    auto f = open_out(o.save_forest);
    save_forest(f, forest);
  }

  Json report = make_report("kernel");
  report["deterministic"]["input"] = input_json(o.in, l);
  report["deterministic"]["forest"] = to_json(forest.params);
  if (o.sparse) {
    const SparseSimilarity s = rpf_kernel_sparse(forest);
    auto f = open_out(dir / "kernel.coo");
    write_kernel_coo(f, s);
    report["deterministic"]["kernel"] = Json{{"n", s.n}, {"stored_entries", s.entries.size()}};
  } else {
    const SimilarityMatrix s = rpf_kernel(forest);
    auto f = open_out(dir / (o.format == "dense" ? "kernel.csv" : "kernel.coo"));
    if (o.format == "dense")
      write_kernel_csv(f, s);
    else
      write_kernel_coo(f, s);
    Json k{{"n", s.size()}, {"nonzeros", s.nonzeros()}};
    if (o.psd) {
      const PsdReport p = validate_psd(s);
      k["lambda_min"] = p.lambda_min;
      k["psd"] = p.passed;
    }
    if (l.data.has_labels()) k["blocks"] = to_json(kernel_block_stats(s, l.data.labels()));
    report["deterministic"]["kernel"] = k;
  }
  write_report(dir / "report.json", report);
  std::cout << "kernel over " << l.data.rows() << " points from " << forest.trees.size() << " trees written to "
            << dir.string() << "\n";
  return 0;
}

// -- baseline ---------------------------------------------------------------

struct BaselineOptions {
  InputOptions in;
  std::string method = "kmeans";
  Index k = 2;
  double sigma = 0.0;
  Index restarts = 0;
  Index max_iterations = 1000;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_baseline(const BaselineOptions& o) {
  const Loaded l = load_input(o.in, o.seed);
  if (o.method != "kmeans" && o.method != "njw") throw ConfigError("--method must be kmeans or njw");
  KMeansConfig km;
  km.K = o.k;
  km.seed = o.seed;
  km.max_iterations = o.max_iterations;
  km.restarts = o.restarts > 0 ? o.restarts : (o.method == "kmeans" ? 100 : 10);
  km.validate();
  if (o.k > l.data.rows()) throw ConfigError("K exceeds the number of points");
  const fs::path dir = output_dir(o.out);

  Json report = make_report("baseline");
  auto& det = report["deterministic"];
  det["input"] = input_json(o.in, l);
  det["method"] = o.method;
  det["kmeans"] = to_json(km);
  std::vector<int> labels;
  if (o.method == "kmeans") {
    const KMeansResult r = kmeans(l.data, km);
    labels = r.labels;
    det["objective"] = r.objective;
    det["iterations"] = r.iterations;
    det["best_restart"] = r.best_restart;
  } else {
    if (o.k < 2) throw ConfigError("NJW needs K >= 2");
    double sigma = o.sigma;
    if (sigma <= 0.0) {
      const auto candidates = default_sigma_candidates(l.data.values());
      const SigmaSearchResult s = sigma_search(l.data.values(), o.k, candidates);
      det["sigma_search"] = to_json(s);
      sigma = s.sigma;
    }
    det["sigma"] = sigma;
    labels = njw_cluster(gaussian_kernel(l.data, sigma), o.k, km).labels;
  }
  if (l.data.has_labels()) {
    const MetricReport m = evaluate(l.data.labels(), labels);
    det["metrics"] = to_json(m);
    print_metrics(m);
  }
  write_assignment(dir / "assignment.csv", l, labels);
  write_report(dir / "report.json", report);
  std::cout << "wrote " << (dir / "report.json").string() << "\n";
  return 0;
}

// -- theory -----------------------------------------------------------------

struct TheoryOptions {
  Index trials = 100000;
  std::uint64_t seed = 7;
  std::uint64_t battery_seed = 2024;
  std::string pair = "default";
  std::string split_rule = "uniform";
  bool generic = false;
  Index replicates = 50;
  std::vector<Index> forest_sizes{200, 400, 600};
  bool skip_concentration = false;
  std::string out;
};

// two unit-variance blobs 3 apart in the plane; far cross pair chosen with a pilot forest
std::pair<RowMatrix, std::pair<Index, Index>> concentration_setup() {
  Rng rng = substream(77, 0);
  std::normal_distribution<double> g;
  RowMatrix x(100, 2);
  for (Index i = 0; i < 100; ++i) {
    x(i, 0) = g(rng) + (i < 50 ? -1.5 : 1.5);
    x(i, 1) = g(rng);
  }
  ForestParams fp;
  fp.trees = 200;
  fp.seed = 999;
  const SimilarityMatrix pilot = rpf_kernel(grow_forest(x, fp));
  std::pair<Index, Index> pair{0, 50};
  double far = -1.0;
  for (Index i = 0; i < 50; ++i)
    for (Index j = 50; j < 100; ++j)
      if (pilot(i, j) >= 0.1 && pilot(i, j) <= 0.5 && (x.row(i) - x.row(j)).norm() > far) {
        far = (x.row(i) - x.row(j)).norm();
        pair = {i, j};
      }
  return {x, pair};
}

int cmd_theory(const TheoryOptions& o) {
  if (o.pair != "default" && o.pair != "same-point") throw ConfigError("--pair must be default or same-point");
  if (o.trials < 1) throw ConfigError("--trials must be at least 1");
  const SplitRule rule = rule_from(o.split_rule);
  const fs::path dir = output_dir(o.out);

  auto cases = separation_battery(o.battery_seed);
  if (o.generic) {
    auto more = generic_battery(o.battery_seed);
    cases.insert(cases.end(), more.begin(), more.end());
  }
  if (o.pair == "same-point")
    for (auto& c : cases) c.b = c.a;
  const auto results = run_battery(cases, rule, o.trials, o.seed);

  Json report = make_report("theory");
  auto& det = report["deterministic"];
  det["trials"] = o.trials;
  det["seed"] = o.seed;
  det["battery_seed"] = o.battery_seed;
  det["pair"] = o.pair;
  det["split_rule"] = to_string(rule);
  Json battery = Json::array();
  Index held = 0;
  for (const auto& r : results) {
    battery.push_back(to_json(r));
    held += r.experiment.bound_holds;
    std::printf("%-28s d/rho=%.4f  empirical=%.5f  bound=%.5f  se=%.5f  %s\n", r.name.c_str(),
                r.experiment.rho > 0 ? r.experiment.distance / r.experiment.rho : 0.0,
                r.experiment.empirical_probability, r.experiment.bound, r.experiment.standard_error,
                r.experiment.bound_holds ? "holds" : "VIOLATED");
  }
  det["battery"] = battery;
  det["bound_holds"] = held;
  det["configurations"] = results.size();
  std::cout << held << "/" << results.size() << " configurations satisfy the bound\n";

  if (!o.skip_concentration) {
    const auto [x, pair] = concentration_setup();
    ForestParams fp;
    fp.seed = 1;
    fp.split_rule = rule;
    const TreeSeparationReport rep = tree_separation_curve(x, fp, pair.first, pair.second, o.replicates, o.forest_sizes);
    det["concentration"] = to_json(rep);
    std::cout << "similarity sd exponent over forest size: " << rep.fitted_exponent << " (binomial: -0.5)\n";
  }
  write_report(dir / "report.json", report);
  std::cout << "wrote " << (dir / "report.json").string() << "\n";
  return 0;
}

// -- benchmark --------------------------------------------------------------

struct BenchmarkCli {
  std::string manifest;
  std::vector<std::string> inputs;
  std::string label_col = "0";
  std::vector<std::uint64_t> seeds{0};
  std::vector<Index> trees{200, 400, 600};
  Index ns = 30;
  bool fast_grid = false;
  bool oracle_tune = false;
  std::vector<std::string> methods{"rpfcluster", "njw", "kmeans"};
  Index max_rows = 2000;
  std::string out;
};

int cmd_benchmark(const BenchmarkCli& o) {
  std::vector<DatasetSpec> specs;
  if (!o.manifest.empty()) specs = load_manifest(o.manifest);
  for (const auto& p : o.inputs) {
    DatasetSpec s;
    s.name = fs::path(p).stem().string();
    s.path = p;
    s.label_column = parse_selector(o.label_col);
    specs.push_back(std::move(s));
  }
  BenchmarkOptions opt;
  opt.seeds = o.seeds;
  opt.tree_counts = o.trees;
  opt.leaf_size = o.ns;
  opt.grid = o.fast_grid ? TuneGrid::fast() : TuneGrid::full();
  opt.criterion = o.oracle_tune ? TuneCriterion::Oracle : TuneCriterion::Eigengap;
  opt.methods = o.methods;
  opt.max_rows = o.max_rows;
  if (opt.tree_counts.empty() || opt.seeds.empty()) throw ConfigError("need at least one seed and tree count");
  const fs::path dir = output_dir(o.out);

  const BenchmarkResult result = run_benchmark(specs, opt);
  for (const auto& d : result.datasets) {
    if (!d.error.empty())
      std::cerr << d.name << ": " << d.error << "\n";
    else if (d.rows_used < d.rows_loaded)
      std::cerr << d.name << ": subsampled " << d.rows_used << " of " << d.rows_loaded << " rows\n";
  }
  {
    auto f = open_out(dir / "benchmark.csv");
    write_benchmark_csv(f, result);
  }
  write_report(dir / "report.json", benchmark_report(result, opt));

  std::printf("%-12s %-11s %5s %9s %9s\n", "dataset", "method", "seed", "rho_c", "rho_r");
  for (const auto& c : result.cells) {
    if (c.metrics)
      std::printf("%-12s %-11s %5llu %8.2f%% %8.2f%%\n", c.dataset.c_str(), c.method.c_str(),
                  static_cast<unsigned long long>(c.seed), 100.0 * c.metrics->rho_c, 100.0 * c.metrics->rho_r);
    else
      std::printf("%-12s %-11s %5llu  failed: %s\n", c.dataset.c_str(), c.method.c_str(),
                  static_cast<unsigned long long>(c.seed), c.error.c_str());
  }
  std::cout << "wrote " << (dir / "benchmark.csv").string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random projection forest kernel and spectral clustering"};
  app.require_subcommand(1);

  ClusterOptions co;
  auto* cluster = app.add_subcommand("cluster", "cluster a CSV dataset with the rpf-kernel");
  add_input_options(cluster, co.in);
  cluster->add_option("--k", co.k, "number of clusters")->required();
  cluster->add_option("--trees", co.trees, "forest size");
  cluster->add_option("--ns", co.ns, "leaf size n_s");
  cluster->add_option("--seed", co.seed);
  cluster->add_option("--split-rule", co.split_rule, "uniform or median");
  cluster->add_option("--beta1", co.beta1, "threshold");
  cluster->add_option("--beta2", co.beta2, "exp rescale scale");
  cluster->add_option("--variant", co.variant, "ncut or njw");
  cluster->add_option("--split-selection", co.selection, "best or largest");
  cluster->add_flag("--literal-exp", co.literal_exp, "apply exp to thresholded zeros too");
  cluster->add_flag("--tune", co.tune, "choose beta1, beta2 by eigengap");
  cluster->add_flag("--oracle-tune", co.oracle_tune, "choose beta1, beta2 against reference labels");
  cluster->add_flag("--fast-grid", co.fast_grid, "coarse tuning grid");
  cluster->add_flag("--tune-cells", co.include_cells, "include every grid cell in the report");
  cluster->add_option("--export-kernel", co.export_kernel, "dense or coo");
  cluster->add_flag("--eigenvector", co.eigenvector, "dump the root split eigenvector");
  cluster->add_option("--out,-o", co.out, "output directory");

  KernelOptions ko;
  auto* kernel = app.add_subcommand("kernel", "compute and export the rpf-kernel");
  add_input_options(kernel, ko.in);
  kernel->add_option("--trees", ko.trees);
  kernel->add_option("--ns", ko.ns);
  kernel->add_option("--seed", ko.seed);
  kernel->add_option("--split-rule", ko.split_rule);
  kernel->add_option("--format", ko.format, "dense or coo");
  kernel->add_flag("--sparse", ko.sparse, "hash-map accumulation, COO output");
  kernel->add_flag("--psd", ko.psd, "report the smallest eigenvalue");
  kernel->add_option("--save-forest", ko.save_forest, "write the forest as JSON");
  kernel->add_option("--load-forest", ko.load_forest, "reuse a saved forest");
  kernel->add_option("--out,-o", ko.out);

  BaselineOptions bo;
  auto* baseline = app.add_subcommand("baseline", "K-means or NJW with a Gaussian kernel");
  add_input_options(baseline, bo.in);
  baseline->add_option("--method", bo.method, "kmeans or njw");
  baseline->add_option("--k", bo.k)->required();
  baseline->add_option("--sigma", bo.sigma, "Gaussian bandwidth; searched when omitted");
  baseline->add_option("--restarts", bo.restarts, "k-means restarts (default 100 for kmeans, 10 for njw)");
  baseline->add_option("--max-iterations", bo.max_iterations);
  baseline->add_option("--seed", bo.seed);
  baseline->add_option("--out,-o", bo.out);

  TheoryOptions to;
  auto* theory = app.add_subcommand("theory", "separation bound battery and similarity concentration");
  theory->add_option("--trials", to.trials, "Monte Carlo splits per configuration");
  theory->add_option("--seed", to.seed);
  theory->add_option("--battery-seed", to.battery_seed);
  theory->add_option("--pair", to.pair, "default or same-point");
  theory->add_option("--split-rule", to.split_rule);
  theory->add_flag("--generic", to.generic, "also run full-dimensional configurations");
  theory->add_option("--replicates", to.replicates);
  theory->add_option("--forest-sizes", to.forest_sizes);
  theory->add_flag("--skip-concentration", to.skip_concentration);
  theory->add_option("--out,-o", to.out);

  BenchmarkCli bc;
  auto* bench = app.add_subcommand("benchmark", "rpfCluster, NJW and K-means over several datasets");
  bench->add_option("--manifest", bc.manifest, "JSON dataset list");
  bench->add_option("--input", bc.inputs, "extra CSV datasets");
  bench->add_option("--label-col", bc.label_col, "label column for --input datasets");
  bench->add_option("--seeds", bc.seeds);
  bench->add_option("--trees", bc.trees, "forest sizes tried for rpfCluster");
  bench->add_option("--ns", bc.ns, "default leaf size");
  bench->add_flag("--fast-grid", bc.fast_grid);
  bench->add_flag("--oracle-tune", bc.oracle_tune);
  bench->add_option("--methods", bc.methods);
  bench->add_option("--max-rows", bc.max_rows);
  bench->add_option("--out,-o", bc.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*cluster) return cmd_cluster(co);
    if (*kernel) return cmd_kernel(ko);
    if (*baseline) return cmd_baseline(bo);
    if (*theory) return cmd_theory(to);
    if (*bench) return cmd_benchmark(bc);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
