#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "rpf/benchmark.hpp"

using namespace rpf;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "rpf_test_benchmark";
  fs::create_directories(dir);
  return dir / name;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream f(p);
  f << text;
}

BenchmarkOptions cheap() {
  BenchmarkOptions opt;
  opt.tree_counts = {50};
  opt.grid.beta1 = {0.0, 0.2};
  opt.grid.beta2 = {0.1, 1.0};
  opt.kmeans.restarts = 5;
  opt.njw_kmeans.restarts = 2;
  return opt;
}

DatasetSpec iris_spec() {
  DatasetSpec s;
  s.name = "iris";
  s.path = std::string(RPF_DATA_DIR) + "/iris.csv";
  s.label_column = std::string("species");
  return s;
}

}  // namespace

TEST_CASE("load_manifest resolves relative paths and reads overrides") {
  const fs::path m = scratch("manifest.json");
  write_text(m, R"({"datasets": [{"name": "a", "path": "a.csv", "label_column": 2, "leaf_size": 12},
                                 {"name": "b", "path": "/abs/b.csv", "label_column": "class", "standardize": [0, 3]}]})");
  const auto specs = load_manifest(m);
  REQUIRE(specs.size() == 2);
  CHECK(specs[0].path == m.parent_path() / "a.csv");
  CHECK(std::get<Index>(specs[0].label_column) == 2);
  CHECK(specs[0].leaf_size == Index{12});
  CHECK(specs[1].path == fs::path("/abs/b.csv"));
  CHECK(std::get<std::string>(specs[1].label_column) == "class");
  CHECK(specs[1].standardize == std::vector<Index>{0, 3});
  CHECK_FALSE(specs[1].leaf_size.has_value());
}

TEST_CASE("load_manifest errors") {
  CHECK_THROWS_AS(load_manifest(scratch("does-not-exist.json")), ConfigError);
  const fs::path bad = scratch("bad.json");
  write_text(bad, "{not json");
  CHECK_THROWS_AS(load_manifest(bad), ConfigError);
  write_text(bad, R"({"sets": []})");
  CHECK_THROWS_AS(load_manifest(bad), ConfigError);
  write_text(bad, R"({"datasets": [{"name": "x"}]})");
  CHECK_THROWS_AS(load_manifest(bad), ConfigError);
}

TEST_CASE("the repository manifest lists the three local datasets") {
  const auto specs = load_manifest(std::string(RPF_DATA_DIR) + "/benchmark.json");
  REQUIRE(specs.size() == 3);
  for (const auto& s : specs) CHECK(fs::exists(s.path));
}

TEST_CASE("run_benchmark rejects empty lists and unknown methods") {
  CHECK_THROWS_AS(run_benchmark({}, cheap()), ConfigError);
  BenchmarkOptions opt = cheap();
  opt.methods = {"kmeans", "dbscan"};
  CHECK_THROWS_AS(run_benchmark({iris_spec()}, opt), ConfigError);
  opt = cheap();
  opt.seeds.clear();
  CHECK_THROWS_AS(run_benchmark({iris_spec()}, opt), ConfigError);
}

TEST_CASE("run_benchmark isolates a failing dataset") {
  DatasetSpec missing;
  missing.name = "missing";
  missing.path = scratch("nothing-here.csv");
  DatasetSpec leafy = iris_spec();
  leafy.name = "iris12";
  leafy.leaf_size = 12;
  const BenchmarkResult r = run_benchmark({missing, leafy}, cheap());
  REQUIRE(r.datasets.size() == 2);
  CHECK_FALSE(r.datasets[0].error.empty());
  CHECK(r.datasets[1].error.empty());
  CHECK(r.datasets[1].leaf_size == 12);
  REQUIRE(r.cells.size() == 6);
  for (int c = 0; c < 3; ++c) {
    CHECK_FALSE(r.cells[c].metrics.has_value());
    CHECK_FALSE(r.cells[c].error.empty());
  }
  for (int c = 3; c < 6; ++c) {
    REQUIRE(r.cells[c].metrics.has_value());
    CHECK(r.cells[c].metrics->rho_c >= 0.0);
    CHECK(r.cells[c].metrics->rho_c <= 1.0);
    CHECK(r.cells[c].metrics->n == 150);
  }
  CHECK(r.cells[3].selected["leaf_size"] == 12);

  std::ostringstream csv;
  write_benchmark_csv(csv, r);
  std::istringstream lines(csv.str());
  std::string header;
  std::getline(lines, header);
  CHECK(header == "dataset,method,seed,rho_c,rho_r,n,K,l,error");
  Index count = 0;
  for (std::string line; std::getline(lines, line);) ++count;
  CHECK(count == 6);
}

TEST_CASE("benchmark report is deterministic and keeps timings apart") {
  BenchmarkOptions opt = cheap();
  opt.methods = {"rpfcluster", "kmeans"};
  opt.seeds = {0, 1};
  const Json a = benchmark_report(run_benchmark({iris_spec()}, opt), opt);
  const Json b = benchmark_report(run_benchmark({iris_spec()}, opt), opt);
  CHECK(a["deterministic"].dump() == b["deterministic"].dump());
  CHECK(a["deterministic"]["cells"].size() == 4);
  CHECK(a["timings"]["cells"].size() == 4);
  CHECK(a["schema_version"] == kReportSchemaVersion);
  CHECK(a["deterministic"].dump().find("elapsed") == std::string::npos);
}

TEST_CASE("run_benchmark subsamples large inputs") {
  BenchmarkOptions opt = cheap();
  opt.methods = {"kmeans"};
  opt.max_rows = 60;
  const BenchmarkResult r = run_benchmark({iris_spec()}, opt);
  CHECK(r.datasets[0].rows_loaded == 150);
  CHECK(r.datasets[0].rows_used == 60);
  CHECK(r.cells[0].metrics->n == 60);
}
