#include "rpf/pipeline.hpp"

#include <chrono>
#include <cmath>

#include "rpf/parallel.hpp"

namespace rpf {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

}  // namespace

std::string to_string(SpectralVariant variant) {
  return variant == SpectralVariant::NJW ? "njw" : "ncut";
}

SpectralVariant spectral_variant_from_string(const std::string& name) {
  if (name == "ncut") return SpectralVariant::NcutRecursive;
  if (name == "njw") return SpectralVariant::NJW;
  throw ConfigError("unknown spectral variant '" + name + "' (expected ncut or njw)");
}

std::string to_string(TuneCriterion criterion) { return criterion == TuneCriterion::Oracle ? "oracle" : "eigengap"; }

void PipelineConfig::validate() const {
  forest.validate();
  if (!(beta1 >= 0.0 && beta1 < 1.0)) throw ConfigError("beta1 must lie in [0, 1)");
  if (!(beta2 > 0.0) || !std::isfinite(beta2)) throw ConfigError("beta2 must be positive");
  // exp(1 / beta2) overflows below this.
  if (beta2 < 1.0 / 700.0) throw ConfigError("beta2 too small: exp(1/beta2) overflows");
  if (K < 1) throw ConfigError("K must be at least 1");
  if (variant == SpectralVariant::NJW && K < 2) throw ConfigError("NJW needs K >= 2");
}

SimilarityMatrix threshold_kernel(const SimilarityMatrix& s, double beta1) {
  if (!(beta1 >= 0.0 && beta1 < 1.0)) throw ConfigError("beta1 must lie in [0, 1)");
  Eigen::MatrixXd m = s.matrix();
  const Eigen::VectorXd diag = m.diagonal();
  m = (m.array() < beta1).select(0.0, m);
  m.diagonal() = diag;
  return SimilarityMatrix(std::move(m));
}

SimilarityMatrix rescale_kernel(const SimilarityMatrix& s, double beta2, bool literal_exp) {
  if (!(beta2 > 0.0)) throw ConfigError("beta2 must be positive");
  const Eigen::MatrixXd& m = s.matrix();
  Eigen::MatrixXd scaled = (m / beta2).array().exp().matrix();
  if (!literal_exp) scaled = (m.array() == 0.0).select(0.0, scaled);
  return SimilarityMatrix(std::move(scaled));
}

ClusterAssignment cluster_kernel(const SimilarityMatrix& kernel, const PipelineConfig& cfg) {
  cfg.validate();
  const SimilarityMatrix affinity = rescale_kernel(threshold_kernel(kernel, cfg.beta1), cfg.beta2, cfg.literal_exp);
  if (cfg.variant == SpectralVariant::NJW) return njw_cluster(affinity, cfg.K, cfg.njw_kmeans);
  return ncut_recursive(affinity, cfg.K, cfg.split_selection);
}

KernelBlockStats kernel_block_stats(const SimilarityMatrix& s, std::span<const int> labels) {
  KernelBlockStats stats;
  stats.block_means = block_means(s, labels);
  double within = 0.0, between = 0.0, nw = 0.0, nb = 0.0;
  for (Index i = 0; i < s.size(); ++i)
    for (Index j = 0; j < s.size(); ++j) {
      if (i == j) continue;
      if (labels[i] == labels[j]) {
        within += s(i, j);
        nw += 1.0;
      } else {
        between += s(i, j);
        nb += 1.0;
      }
    }
  stats.within_mean = nw > 0.0 ? within / nw : 0.0;
  stats.between_mean = nb > 0.0 ? between / nb : 0.0;
  return stats;
}

namespace {

ClusterRun finish_run(const DataMatrix& data, const PipelineConfig& cfg, SimilarityMatrix kernel, Diagnostics diag) {
  auto start = Clock::now();
  const SimilarityMatrix thresholded = threshold_kernel(kernel, cfg.beta1);
  diag.thresholded_nonzeros = thresholded.nonzeros();
  const SimilarityMatrix affinity = rescale_kernel(thresholded, cfg.beta2, cfg.literal_exp);
  diag.timings_ms["threshold_rescale"] = elapsed_ms(start);

  start = Clock::now();
  ClusterAssignment assignment = cfg.variant == SpectralVariant::NJW
                                     ? njw_cluster(affinity, cfg.K, cfg.njw_kmeans)
                                     : ncut_recursive(affinity, cfg.K, cfg.split_selection);
  diag.timings_ms["spectral"] = elapsed_ms(start);

  if (data.has_labels()) {
    diag.blocks = kernel_block_stats(kernel, data.labels());
    diag.metrics = evaluate(data.labels(), assignment.labels);
  }
  return ClusterRun{std::move(assignment), std::move(kernel), std::move(diag)};
}

std::pair<SimilarityMatrix, Diagnostics> build_kernel(const DataMatrix& data, const PipelineConfig& cfg) {
  cfg.validate();
  if (cfg.K > data.rows()) throw ConfigError("K exceeds the number of points");
  Diagnostics diag;
  auto start = Clock::now();
  const RpForest forest = grow_forest(data, cfg.forest);
  diag.timings_ms["forest"] = elapsed_ms(start);
  start = Clock::now();
  SimilarityMatrix kernel = rpf_kernel(forest);
  diag.timings_ms["kernel"] = elapsed_ms(start);
  diag.kernel_nonzeros = kernel.nonzeros();
  return {std::move(kernel), std::move(diag)};
}

}  // namespace

ClusterRun rpf_cluster(const DataMatrix& data, const PipelineConfig& cfg) {
  auto [kernel, diag] = build_kernel(data, cfg);
  return finish_run(data, cfg, std::move(kernel), std::move(diag));
}

TuneGrid TuneGrid::full() {
  TuneGrid grid;
  grid.beta1 = {0.0, 0.1, 0.2, 0.3, 0.4};
  for (int k = 1; k <= 100; ++k) grid.beta2.push_back(k / 100.0);
  for (int k = 11; k <= 2000; ++k) grid.beta2.push_back(k / 10.0);
  return grid;
}

TuneGrid TuneGrid::fast() {
  TuneGrid grid;
  grid.beta1 = {0.0, 0.1, 0.2, 0.3, 0.4};
  grid.beta2 = {0.01, 0.02, 0.05, 0.1, 0.2, 0.3, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 5.0, 10.0, 20.0, 50.0, 100.0, 200.0};
  return grid;
}

TuneResult tune(const SimilarityMatrix& kernel, const PipelineConfig& cfg, const TuneGrid& grid, TuneCriterion criterion,
                std::span<const int> labels) {
  if (grid.beta1.empty() || grid.beta2.empty()) throw ConfigError("tuning grid is empty");
  if (criterion == TuneCriterion::Oracle && labels.size() != kernel.size())
    throw ConfigError("oracle tuning needs reference labels for every point");
  if (criterion == TuneCriterion::Eigengap && cfg.K >= kernel.size())
    throw ConfigError("eigengap tuning needs K < n");

  TuneResult result;
  result.cells.resize(grid.beta1.size() * grid.beta2.size());
  for (std::size_t a = 0; a < grid.beta1.size(); ++a)
    for (std::size_t b = 0; b < grid.beta2.size(); ++b) {
      auto& cell = result.cells[a * grid.beta2.size() + b];
      cell.beta1 = grid.beta1[a];
      cell.beta2 = grid.beta2[b];
    }

  parallel_for(result.cells.size(), [&](Index c) {
    auto& cell = result.cells[c];
    PipelineConfig local = cfg;
    local.beta1 = cell.beta1;
    local.beta2 = cell.beta2;
    if (criterion == TuneCriterion::Eigengap) {
      const SimilarityMatrix affinity = rescale_kernel(threshold_kernel(kernel, cell.beta1), cell.beta2, cfg.literal_exp);
      cell.score = eigengap(affinity, cfg.K);
    } else {
      const ClusterAssignment assignment = cluster_kernel(kernel, local);
      cell.score = clustering_accuracy(labels, assignment.labels);
      cell.secondary = cocluster_accuracy(labels, assignment.labels);
    }
  });

  // Cells are in lexicographic (beta1, beta2) order when both axes ascend, so
  // strict improvement keeps the smallest pair on ties.
  std::size_t best = 0;
  for (std::size_t c = 1; c < result.cells.size(); ++c) {
    const auto& x = result.cells[c];
    const auto& y = result.cells[best];
    const bool better = x.score > y.score || (x.score == y.score && x.secondary > y.secondary) ||
                        (x.score == y.score && x.secondary == y.secondary &&
                         std::pair(x.beta1, x.beta2) < std::pair(y.beta1, y.beta2));
    if (better) best = c;
  }
  result.beta1 = result.cells[best].beta1;
  result.beta2 = result.cells[best].beta2;
  result.score = result.cells[best].score;
  return result;
}

TunedRun rpf_cluster_tuned(const DataMatrix& data, const PipelineConfig& cfg, const TuneGrid& grid,
                           TuneCriterion criterion) {
  auto [kernel, diag] = build_kernel(data, cfg);
  auto start = Clock::now();
  std::vector<int> labels;
  if (criterion == TuneCriterion::Oracle) labels = data.labels();
  TuneResult tuning = tune(kernel, cfg, grid, criterion, labels);
  diag.timings_ms["tuning"] = elapsed_ms(start);

  PipelineConfig chosen = cfg;
  chosen.beta1 = tuning.beta1;
  chosen.beta2 = tuning.beta2;
  return TunedRun{finish_run(data, chosen, std::move(kernel), std::move(diag)), std::move(tuning)};
}

}  // namespace rpf
