#include "rpf/benchmark.hpp"

#include <chrono>
#include <fstream>
#include <ostream>

#include "rpf/parallel.hpp"

namespace rpf {

namespace {

using Clock = std::chrono::steady_clock;

struct Prepared {
  DataMatrix data;
  Index leaf_size = 30;
};

MetricReport cluster_rpf(const DataMatrix& data, Index leaf_size, std::uint64_t seed, const BenchmarkOptions& opt,
                         Json& selected) {
  PipelineConfig cfg;
  cfg.K = static_cast<Index>(data.num_classes());
  cfg.forest.leaf_size = leaf_size;
  cfg.forest.seed = seed;
  std::optional<TunedRun> best;
  Index best_trees = 0;
  for (Index trees : opt.tree_counts) {
    cfg.forest.trees = trees;
    TunedRun run = rpf_cluster_tuned(data, cfg, opt.grid, opt.criterion);
    if (!best || run.tuning.score > best->tuning.score) {
      best = std::move(run);
      best_trees = trees;
    }
  }
  selected = Json{{"trees", best_trees},
                  {"leaf_size", leaf_size},
                  {"beta1", best->tuning.beta1},
                  {"beta2", best->tuning.beta2},
                  {"criterion", to_string(opt.criterion)}};
  return *best->run.diagnostics.metrics;
}

MetricReport cluster_njw(const DataMatrix& data, std::uint64_t seed, const BenchmarkOptions& opt, Json& selected) {
  const Index K = static_cast<Index>(data.num_classes());
  const auto candidates = default_sigma_candidates(data.values());
  const SigmaSearchResult search = sigma_search(data.values(), K, candidates);
  KMeansConfig km = opt.njw_kmeans;
  km.seed = seed;
  const ClusterAssignment a = njw_cluster(gaussian_kernel(data.values(), search.sigma), K, km);
  selected = Json{{"sigma", search.sigma}, {"eigengap", search.eigengap}};
  return evaluate(data.labels(), a.labels);
}

MetricReport cluster_kmeans(const DataMatrix& data, std::uint64_t seed, const BenchmarkOptions& opt, Json& selected) {
  KMeansConfig km = opt.kmeans;
  km.K = static_cast<Index>(data.num_classes());
  km.seed = seed;
  const KMeansResult r = kmeans(data, km);
  selected = Json{{"objective", r.objective}, {"best_restart", r.best_restart}};
  return evaluate(data.labels(), r.labels);
}

}  // namespace

std::vector<DatasetSpec> load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("manifest not found: " + path.string());
  Json j;
  try {
    in >> j;
  } catch (const Json::exception& e) {
    throw ConfigError("malformed manifest: " + std::string(e.what()));
  }
  if (!j.contains("datasets") || !j["datasets"].is_array()) throw ConfigError("manifest needs a \"datasets\" array");
  std::vector<DatasetSpec> specs;
  for (const auto& d : j["datasets"]) {
    try {
      DatasetSpec s;
      s.name = d.at("name").get<std::string>();
      std::filesystem::path p = d.at("path").get<std::string>();
      s.path = p.is_absolute() ? p : path.parent_path() / p;
      const auto& label = d.at("label_column");
      if (label.is_string()) s.label_column = label.get<std::string>();
      else s.label_column = label.get<Index>();
      if (d.contains("standardize")) s.standardize = d["standardize"].get<std::vector<Index>>();
      if (d.contains("leaf_size")) s.leaf_size = d["leaf_size"].get<Index>();
      specs.push_back(std::move(s));
    } catch (const Json::exception& e) {
      throw ConfigError("bad manifest entry: " + std::string(e.what()));
    }
  }
  return specs;
}

BenchmarkResult run_benchmark(const std::vector<DatasetSpec>& specs, const BenchmarkOptions& options) {
  if (specs.empty()) throw ConfigError("benchmark needs at least one dataset");
  if (options.seeds.empty()) throw ConfigError("benchmark needs at least one seed");
  if (options.tree_counts.empty()) throw ConfigError("benchmark needs at least one tree count");
  for (const auto& m : options.methods)
    if (m != "rpfcluster" && m != "njw" && m != "kmeans") throw ConfigError("unknown benchmark method '" + m + "'");

  BenchmarkResult result;
  std::vector<std::optional<Prepared>> prepared;
  for (const auto& spec : specs) {
    DatasetInfo info;
    info.name = spec.name;
    info.leaf_size = spec.leaf_size.value_or(options.leaf_size);
    info.standardized = spec.standardize;
    try {
      CsvOptions csv;
      csv.label_column = spec.label_column;
      DataMatrix data = load_csv(spec.path, csv);
      info.rows_loaded = data.rows();
      data = standardize(data, spec.standardize);
      if (data.rows() > options.max_rows) data = subsample(data, options.max_rows, options.seeds.front());
      if (data.num_classes() < 2) throw ConfigError("dataset needs at least two classes");
      info.rows_used = data.rows();
      info.features = data.cols();
      info.classes = data.num_classes();
      prepared.push_back(Prepared{std::move(data), info.leaf_size});
    } catch (const std::exception& e) {
      info.error = e.what();
      prepared.push_back(std::nullopt);
    }
    result.datasets.push_back(std::move(info));
  }

  for (Index d = 0; d < specs.size(); ++d)
    for (const auto& method : options.methods)
      for (std::uint64_t seed : options.seeds) {
        BenchmarkCell cell;
        cell.dataset = specs[d].name;
        cell.method = method;
        cell.seed = seed;
        if (!prepared[d]) cell.error = "dataset unavailable: " + result.datasets[d].error;
        result.cells.push_back(std::move(cell));
      }

  const Index per_dataset = options.methods.size() * options.seeds.size();
  parallel_for(result.cells.size(), [&](Index c) {
    auto& cell = result.cells[c];
    const auto& prep = prepared[c / per_dataset];
    if (!prep) return;
    const auto start = Clock::now();
    try {
      if (cell.method == "rpfcluster") cell.metrics = cluster_rpf(prep->data, prep->leaf_size, cell.seed, options, cell.selected);
      else if (cell.method == "njw") cell.metrics = cluster_njw(prep->data, cell.seed, options, cell.selected);
      else cell.metrics = cluster_kmeans(prep->data, cell.seed, options, cell.selected);
    } catch (const std::exception& e) {
      cell.error = e.what();
    }
    cell.elapsed_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
  });
  return result;
}

Json benchmark_report(const BenchmarkResult& result, const BenchmarkOptions& options) {
  Json report = make_report("benchmark");
  Json& det = report["deterministic"];
  Json seeds = Json::array();
  for (auto s : options.seeds) seeds.push_back(s);
  det["options"] = Json{{"seeds", seeds},
                        {"tree_counts", options.tree_counts},
                        {"leaf_size", options.leaf_size},
                        {"beta1_grid", options.grid.beta1},
                        {"beta2_grid_size", options.grid.beta2.size()},
                        {"criterion", to_string(options.criterion)},
                        {"max_rows", options.max_rows},
                        {"kmeans", to_json(options.kmeans)},
                        {"njw_kmeans", to_json(options.njw_kmeans)},
                        {"methods", options.methods}};
  Json datasets = Json::array();
  for (const auto& d : result.datasets) {
    Json j{{"name", d.name}, {"rows_loaded", d.rows_loaded}, {"rows_used", d.rows_used}, {"features", d.features},
           {"classes", d.classes}, {"leaf_size", d.leaf_size}, {"standardized", d.standardized}};
    if (!d.error.empty()) j["error"] = d.error;
    datasets.push_back(std::move(j));
  }
  det["datasets"] = std::move(datasets);
  Json cells = Json::array();
  Json timings = Json::array();
  for (const auto& c : result.cells) {
    Json j{{"dataset", c.dataset}, {"method", c.method}, {"seed", c.seed}};
    if (c.metrics) j["metrics"] = to_json(*c.metrics);
    if (!c.selected.is_null()) j["selected"] = c.selected;
    if (!c.error.empty()) j["error"] = c.error;
    cells.push_back(std::move(j));
    timings.push_back(Json{{"dataset", c.dataset}, {"method", c.method}, {"seed", c.seed}, {"elapsed_ms", c.elapsed_ms}});
  }
  det["cells"] = std::move(cells);
  report["timings"]["cells"] = std::move(timings);
  return report;
}

void write_benchmark_csv(std::ostream& out, const BenchmarkResult& result) {
  out << "dataset,method,seed,rho_c,rho_r,n,K,l,error\n";
  for (const auto& c : result.cells) {
    out << c.dataset << ',' << c.method << ',' << c.seed << ',';
    if (c.metrics)
      out << c.metrics->rho_c << ',' << c.metrics->rho_r << ',' << c.metrics->n << ',' << c.metrics->K << ','
          << c.metrics->l;
    else
      out << ",,,,";
    std::string err = c.error;
    for (char& ch : err)
      if (ch == ',' || ch == '\n') ch = ';';
    out << ',' << err << '\n';
  }
}

}  // namespace rpf
