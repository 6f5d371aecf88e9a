#pragma once

#include <span>
#include <string>
#include <vector>

#include "rpf/common.hpp"
#include "rpf/dataset.hpp"
#include "rpf/kernel.hpp"

namespace rpf {

enum class KMeansInit { KMeansPlusPlus, RandomPartition };

struct KMeansConfig {
  Index K = 2;
  Index max_iterations = 1000;
  Index restarts = 100;
  std::uint64_t seed = 0;
  KMeansInit init = KMeansInit::KMeansPlusPlus;

  void validate() const;
};

struct KMeansResult {
  std::vector<int> labels;
  RowMatrix centroids;  ///< K x p
  double objective = 0.0;  ///< within-cluster sum of squares
  Index iterations = 0;
  Index best_restart = 0;
  /// Objective after every assignment step of the winning restart.
  std::vector<double> history;
};

/// Lloyd iterations from the given centroids until the objective changes by
/// less than 1e-9 or max_iterations is reached. An emptied cluster is re-seeded
/// with the point farthest from its current centroid.
KMeansResult lloyd(const RowMatrix& points, RowMatrix centroids, Index max_iterations);

/// Best of cfg.restarts Lloyd runs by objective; restart r is seeded from
/// substream(cfg.seed, r) and ties keep the lower restart index.
KMeansResult kmeans(const RowMatrix& points, const KMeansConfig& cfg);
KMeansResult kmeans(const DataMatrix& data, const KMeansConfig& cfg);

/// S_ij = exp(-|x_i - x_j|^2 / (2 sigma^2)).
SimilarityMatrix gaussian_kernel(const RowMatrix& points, double sigma);
SimilarityMatrix gaussian_kernel(const DataMatrix& data, double sigma);

/// Median of the pairwise Euclidean distances.
double median_pairwise_distance(const RowMatrix& points);

/// Geometric grid of bandwidths around the median pairwise distance:
/// median * 2^(k/2) for k = -8..4.
std::vector<double> default_sigma_candidates(const RowMatrix& points);

struct SigmaSearchResult {
  double sigma = 0.0;
  double eigengap = 0.0;
  std::vector<double> candidates;
  std::vector<double> gaps;
};

/// Candidate maximizing the normalized-Laplacian eigengap at K; ties go to the
/// smallest sigma.
SigmaSearchResult sigma_search(const RowMatrix& points, Index K, std::span<const double> candidates);

}  // namespace rpf
