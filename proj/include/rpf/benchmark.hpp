#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rpf/dataset.hpp"
#include "rpf/metrics.hpp"
#include "rpf/pipeline.hpp"
#include "rpf/report.hpp"

namespace rpf {

struct DatasetSpec {
  std::string name;
  std::filesystem::path path;
  ColumnSelector label_column = Index{0};
  /// 0-based feature columns (label column excluded) to standardize.
  std::vector<Index> standardize;
  /// n_s override for this dataset.
  std::optional<Index> leaf_size;
};

/// Reads a JSON manifest:
///   {"datasets": [{"name": "wine", "path": "wine.csv", "label_column": "cultivar",
///                  "standardize": [4, 12], "leaf_size": 30}, ...]}
/// Relative paths are resolved against the manifest's directory.
std::vector<DatasetSpec> load_manifest(const std::filesystem::path& path);

struct BenchmarkOptions {
  std::vector<std::uint64_t> seeds{0};
  /// rpfCluster forest sizes tried per seed; the tuning criterion picks among them.
  std::vector<Index> tree_counts{200, 400, 600};
  Index leaf_size = 30;
  TuneGrid grid = TuneGrid::full();
  TuneCriterion criterion = TuneCriterion::Eigengap;
  /// Rows above this are uniformly subsampled (seeded) before clustering.
  Index max_rows = 2000;
  KMeansConfig kmeans{.K = 2, .max_iterations = 1000, .restarts = 100, .seed = 0, .init = KMeansInit::KMeansPlusPlus};
  KMeansConfig njw_kmeans{.K = 2, .max_iterations = 1000, .restarts = 10, .seed = 0, .init = KMeansInit::KMeansPlusPlus};
  std::vector<std::string> methods{"rpfcluster", "njw", "kmeans"};
};

struct BenchmarkCell {
  std::string dataset;
  std::string method;
  std::uint64_t seed = 0;
  std::optional<MetricReport> metrics;
  std::string error;  ///< nonempty when the cell failed
  Json selected;      ///< method-specific chosen parameters
  double elapsed_ms = 0.0;
};

struct DatasetInfo {
  std::string name;
  Index rows_loaded = 0;
  Index rows_used = 0;
  Index features = 0;
  int classes = 0;
  Index leaf_size = 0;
  std::vector<Index> standardized;
  std::string error;  ///< load or preprocessing failure
};

struct BenchmarkResult {
  std::vector<DatasetInfo> datasets;
  std::vector<BenchmarkCell> cells;  ///< dataset, method, seed order
};

/// Loads each dataset, then runs every (dataset, method, seed) cell as an
/// independent task. A failing dataset or cell is recorded and the run goes
/// on. Throws ConfigError on an empty dataset list or unknown method.
BenchmarkResult run_benchmark(const std::vector<DatasetSpec>& specs, const BenchmarkOptions& options);

/// Deterministic report content; timings go to report["timings"].
Json benchmark_report(const BenchmarkResult& result, const BenchmarkOptions& options);

/// dataset,method,seed,rho_c,rho_r,n,K,l,error
void write_benchmark_csv(std::ostream& out, const BenchmarkResult& result);

}  // namespace rpf
