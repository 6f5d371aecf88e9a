#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rpf/baselines.hpp"
#include "rpf/dataset.hpp"
#include "rpf/kernel.hpp"
#include "rpf/metrics.hpp"
#include "rpf/rpforest.hpp"
#include "rpf/spectral.hpp"

namespace rpf {

enum class SpectralVariant { NcutRecursive, NJW };

std::string to_string(SpectralVariant variant);
SpectralVariant spectral_variant_from_string(const std::string& name);

struct PipelineConfig {
  ForestParams forest;
  /// Kernel entries below beta1 are zeroed.
  double beta1 = 0.0;
  /// Retained entries become exp(S / beta2).
  double beta2 = 1.0;
  Index K = 2;
  SpectralVariant variant = SpectralVariant::NcutRecursive;
  SplitSelection split_selection = SplitSelection::BestNcut;
  /// Apply exp to thresholded zeros as well (they become 1).
  bool literal_exp = false;
  /// K-means settings for the NJW variant; K is taken from the field above.
  KMeansConfig njw_kmeans{.K = 2, .max_iterations = 1000, .restarts = 10, .seed = 0, .init = KMeansInit::KMeansPlusPlus};

  void validate() const;
};

/// Zeroes off-diagonal entries below beta1; the diagonal is kept.
SimilarityMatrix threshold_kernel(const SimilarityMatrix& s, double beta1);

/// exp(S_ij / beta2) on nonzero entries; zeros stay zero unless literal_exp.
SimilarityMatrix rescale_kernel(const SimilarityMatrix& s, double beta2, bool literal_exp = false);

/// Threshold, rescale and spectral steps on an already computed kernel.
ClusterAssignment cluster_kernel(const SimilarityMatrix& kernel, const PipelineConfig& cfg);

struct KernelBlockStats {
  Eigen::MatrixXd block_means;  ///< l x l, between reference classes
  double within_mean = 0.0;
  double between_mean = 0.0;
};

KernelBlockStats kernel_block_stats(const SimilarityMatrix& s, std::span<const int> labels);

struct Diagnostics {
  std::map<std::string, double> timings_ms;
  Index kernel_nonzeros = 0;
  Index thresholded_nonzeros = 0;
  std::optional<KernelBlockStats> blocks;
  std::optional<MetricReport> metrics;
};

struct ClusterRun {
  ClusterAssignment assignment;
  SimilarityMatrix kernel;  ///< raw rpf-kernel, before threshold and rescale
  Diagnostics diagnostics;
};

/// grow_forest -> rpf_kernel -> threshold_kernel -> rescale_kernel -> spectral.
/// Block statistics and metrics are filled in when the data carries labels.
ClusterRun rpf_cluster(const DataMatrix& data, const PipelineConfig& cfg);

struct TuneGrid {
  std::vector<double> beta1;
  std::vector<double> beta2;

  /// beta1 in {0, .1, .2, .3, .4}; beta2 over (0, 1] step 0.01 then (1, 200] step 0.1.
  static TuneGrid full();
  /// Same beta1 values, 18 beta2 values spread log-uniformly over [0.01, 200].
  static TuneGrid fast();
};

enum class TuneCriterion {
  Eigengap,  ///< label-free: largest lambda_{K+1} - lambda_K of the processed affinity
  Oracle,    ///< largest rho_c against reference labels, rho_r breaking ties
};

std::string to_string(TuneCriterion criterion);

struct TuneCell {
  double beta1 = 0.0;
  double beta2 = 0.0;
  double score = 0.0;
  double secondary = 0.0;
};

struct TuneResult {
  double beta1 = 0.0;
  double beta2 = 0.0;
  double score = 0.0;
  std::vector<TuneCell> cells;  ///< beta1-major grid order
};

/// Evaluates every (beta1, beta2) cell on `kernel`. Remaining ties go to the
/// lexicographically smallest (beta1, beta2).
TuneResult tune(const SimilarityMatrix& kernel, const PipelineConfig& cfg, const TuneGrid& grid, TuneCriterion criterion,
                std::span<const int> labels = {});

struct TunedRun {
  ClusterRun run;
  TuneResult tuning;
};

/// rpf_cluster with (beta1, beta2) chosen by `tune` on the forest's kernel.
TunedRun rpf_cluster_tuned(const DataMatrix& data, const PipelineConfig& cfg, const TuneGrid& grid,
                           TuneCriterion criterion);

}  // namespace rpf
