#include <doctest.h>

#include "../support/oracles.hpp"
#include "rpf/pipeline.hpp"
#include "rpf/report.hpp"

using namespace rpf;

namespace {

DataMatrix iris() {
  CsvOptions opt;
  opt.label_column = ColumnSelector{std::string("species")};
  return load_csv(std::string(RPF_DATA_DIR) + "/iris.csv", opt);
}

}  // namespace

TEST_CASE("threshold_kernel examples") {
  Eigen::MatrixXd m(3, 3);
  m << 1, 0.05, 0.5, 0.05, 1, 0.1, 0.5, 0.1, 1;
  const SimilarityMatrix s(m);
  CHECK(threshold_kernel(s, 0.0).matrix() == m);
  const SimilarityMatrix t = threshold_kernel(s, 0.1);
  CHECK(t(0, 1) == 0.0);
  CHECK(t(1, 2) == 0.1);  // not below the threshold
  CHECK(t(0, 2) == 0.5);
  CHECK(t.matrix().diagonal() == Eigen::Vector3d::Ones());
  // diagonal is exempt even when below
  Eigen::MatrixXd low = m;
  low.diagonal().setConstant(0.2);
  CHECK(threshold_kernel(SimilarityMatrix(low), 0.3)(1, 1) == 0.2);
  CHECK_THROWS_AS(threshold_kernel(s, 1.0), ConfigError);
  CHECK_THROWS_AS(threshold_kernel(s, -0.1), ConfigError);
}

TEST_CASE("rescale_kernel examples") {
  Eigen::MatrixXd m(2, 2);
  m << 1, 0, 0, 1;
  const SimilarityMatrix s(m);
  CHECK(rescale_kernel(s, 1.0)(0, 0) == doctest::Approx(std::exp(1.0)));
  CHECK(rescale_kernel(s, 1.0)(0, 1) == 0.0);
  CHECK(rescale_kernel(s, 1.0, true)(0, 1) == 1.0);  // literal exp(0)
  Eigen::MatrixXd v(3, 3);
  v << 1, 0.2, 0.7, 0.2, 1, 0.4, 0.7, 0.4, 1;
  const SimilarityMatrix r = rescale_kernel(SimilarityMatrix(v), 0.3);
  CHECK(r(0, 1) < r(1, 2));
  CHECK(r(1, 2) < r(0, 2));
  CHECK(r.matrix() == r.matrix().transpose());
  CHECK_THROWS_AS(rescale_kernel(s, 0.0), ConfigError);
}

TEST_CASE("threshold strictly before rescale") {
  Eigen::MatrixXd m(3, 3);
  m << 1, 0.05, 0.9, 0.05, 1, 0.05, 0.9, 0.05, 1;
  PipelineConfig cfg;
  cfg.beta1 = 0.1;
  cfg.beta2 = 0.5;
  const SimilarityMatrix processed = rescale_kernel(threshold_kernel(SimilarityMatrix(m), cfg.beta1), cfg.beta2);
  CHECK(processed(0, 1) == 0.0);
  CHECK(processed(0, 2) == doctest::Approx(std::exp(1.8)));
}

TEST_CASE("pipeline config validation") {
  PipelineConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.K = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.K = 2;
  cfg.beta1 = 1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.beta1 = 0.0;
  cfg.beta2 = -1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.beta2 = 1e-4;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.beta2 = 1.0;
  cfg.variant = SpectralVariant::NJW;
  cfg.K = 1;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  CHECK(spectral_variant_from_string("njw") == SpectralVariant::NJW);
  CHECK_THROWS_AS(spectral_variant_from_string("x"), ConfigError);
}

TEST_CASE("iris kernel: thresholding keeps within-class links") {
  const DataMatrix d = iris();
  PipelineConfig cfg;
  cfg.K = 3;
  cfg.forest.seed = 2;
  const ClusterRun run = rpf_cluster(d, cfg);
  const SimilarityMatrix t = threshold_kernel(run.kernel, 0.1);
  CHECK(t.nonzeros() < run.kernel.nonzeros());
  double within = 0, within_n = 0, between = 0, between_n = 0;
  for (Index i = 0; i < 150; ++i)
    for (Index j = 0; j < 150; ++j) {
      if (i == j) continue;
      const bool nz = t(i, j) != 0.0;
      if (d.labels()[i] == d.labels()[j]) {
        within += nz;
        ++within_n;
      } else {
        between += nz;
        ++between_n;
      }
    }
  CHECK(within / within_n > between / between_n);
  REQUIRE(run.diagnostics.metrics.has_value());
  REQUIRE(run.diagnostics.blocks.has_value());
  CHECK(run.diagnostics.blocks->within_mean > run.diagnostics.blocks->between_mean);
  CHECK(run.diagnostics.timings_ms.count("forest") == 1);
  CHECK(run.diagnostics.timings_ms.count("spectral") == 1);
}

TEST_CASE("rpf_cluster: two 10-sigma blobs are recovered exactly") {
  std::vector<int> truth;
  const RowMatrix x = oracle::gaussian_blobs({Eigen::RowVector2d(0, 0), Eigen::RowVector2d(10, 0)}, 100, 1.0, 8, &truth);
  const DataMatrix d(x, truth);
  for (auto variant : {SpectralVariant::NcutRecursive, SpectralVariant::NJW}) {
    PipelineConfig cfg;
    cfg.K = 2;
    cfg.forest.trees = 100;
    cfg.variant = variant;
    const ClusterRun run = rpf_cluster(d, cfg);
    CHECK(run.diagnostics.metrics->rho_c == 1.0);
  }
}

TEST_CASE("rpf_cluster: K = n gives singletons; determinism; unlabeled data") {
  RowMatrix x(6, 2);
  x << 0, 0, 1, 0, 0, 1, 5, 5, 6, 5, 5, 6;
  PipelineConfig cfg;
  cfg.K = 6;
  cfg.forest.leaf_size = 2;
  cfg.forest.trees = 50;
  const ClusterRun run = rpf_cluster(DataMatrix(x), cfg);
  CHECK(run.assignment.clusters().size() == 6);
  CHECK_FALSE(run.diagnostics.metrics.has_value());
  cfg.K = 7;
  CHECK_THROWS_AS(rpf_cluster(DataMatrix(x), cfg), ConfigError);

  const DataMatrix d = iris();
  PipelineConfig c3;
  c3.K = 3;
  c3.forest.trees = 100;
  c3.beta1 = 0.1;
  c3.beta2 = 0.2;
  CHECK(rpf_cluster(d, c3).assignment.labels == rpf_cluster(d, c3).assignment.labels);
}

TEST_CASE("tuning: grids, criteria and tie-break") {
  const TuneGrid full = TuneGrid::full();
  CHECK(full.beta1 == std::vector<double>{0.0, 0.1, 0.2, 0.3, 0.4});
  CHECK(full.beta2.size() == 100 + 1990);
  CHECK(full.beta2.front() == 0.01);
  CHECK(full.beta2[99] == 1.0);
  CHECK(full.beta2[100] == doctest::Approx(1.1));
  CHECK(full.beta2.back() == 200.0);

  const DataMatrix d = iris();
  PipelineConfig cfg;
  cfg.K = 3;
  cfg.forest.trees = 100;
  const TunedRun oracle_run = rpf_cluster_tuned(d, cfg, TuneGrid::fast(), TuneCriterion::Oracle);
  CHECK(oracle_run.tuning.cells.size() == 5 * 18);
  // no other cell beats the choice on the primary score
  for (const auto& c : oracle_run.tuning.cells) CHECK(c.score <= oracle_run.tuning.score);
  CHECK(oracle_run.run.diagnostics.metrics->rho_c == oracle_run.tuning.score);

  const TunedRun gap_run = rpf_cluster_tuned(d, cfg, TuneGrid::fast(), TuneCriterion::Eigengap);
  for (const auto& c : gap_run.tuning.cells) CHECK(c.score <= gap_run.tuning.score);

  // constant scores: smallest pair wins
  Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(4, 4);
  PipelineConfig small;
  small.K = 1;
  TuneGrid g;
  g.beta1 = {0.0, 0.2};
  g.beta2 = {0.5, 2.0};
  const std::vector<int> labels{0, 0, 0, 0};
  const TuneResult t = tune(SimilarityMatrix(ones), small, g, TuneCriterion::Oracle, labels);
  CHECK(t.beta1 == 0.0);
  CHECK(t.beta2 == 0.5);
  CHECK_THROWS_AS(tune(SimilarityMatrix(ones), small, g, TuneCriterion::Oracle), ConfigError);
}

TEST_CASE("run report: deterministic section is reproducible") {
  const DataMatrix d = iris();
  PipelineConfig cfg;
  cfg.K = 3;
  cfg.forest.trees = 50;
  auto make = [&] {
    Json r = make_report("cluster");
    add_cluster_run(r, cfg, rpf_cluster(d, cfg));
    return r;
  };
  const Json a = make();
  const Json b = make();
  CHECK(a["schema_version"] == kReportSchemaVersion);
  CHECK(a["deterministic"].dump() == b["deterministic"].dump());
  CHECK(a["deterministic"]["metrics"].contains("rho_c"));
  CHECK(a["deterministic"]["metrics"].contains("rho_r"));
  CHECK(a["deterministic"]["config"]["forest"]["trees"] == 50);
  CHECK(a["timings"].contains("forest_ms"));
}
