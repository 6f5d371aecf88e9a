#pragma once

#include <span>
#include <vector>

#include "rpf/baselines.hpp"
#include "rpf/common.hpp"
#include "rpf/kernel.hpp"

namespace rpf {

/// Whether S_ii contributes edge weight to the affinity graph.
enum class SelfLoops { Exclude, Include };

/// Edge weights and degrees of the graph spectral clustering runs on. With
/// SelfLoops::Exclude (the default) the diagonal of S is dropped, so the
/// constant self-similarity of a kernel does not inflate the degrees.
struct AffinityGraph {
  Eigen::MatrixXd weights;
  Eigen::VectorXd degree;
};

AffinityGraph make_affinity_graph(const SimilarityMatrix& s, SelfLoops loops = SelfLoops::Exclude);

/// Cluster ids in 0..K-1, numbered by first appearance in point order.
struct ClusterAssignment {
  std::vector<int> labels;
  int K = 0;

  /// Renumbers arbitrary nonnegative ids by first appearance.
  static ClusterAssignment from_labels(std::span<const int> raw);
  std::vector<IndexSet> clusters() const;
};

/// E(V1, V2) = sum of S_ij over V1 x V2. Throws ConfigError if the sets overlap.
double cut_size(const SimilarityMatrix& s, std::span<const Index> v1, std::span<const Index> v2);

/// sum_j [E(V_j, V) - E(V_j, V_j)] / E(V_j, V) over a partition of all points,
/// evaluated on S as given (diagonal included). Throws ConfigError on a part
/// with zero volume or a non-partition.
double ncut_objective(const SimilarityMatrix& s, std::span<const IndexSet> parts);
double ncut_objective(const Eigen::MatrixXd& weights, std::span<const IndexSet> parts);

struct Bipartition {
  IndexSet nonnegative;  ///< {i : v_i >= 0}
  IndexSet negative;     ///< {i : v_i < 0}
  /// Generalized eigenvector v of (D - W) v = lambda D v, unit norm, entry of
  /// largest magnitude positive. Zero on isolated vertices.
  Eigen::VectorXd eigenvector;
  /// D^{1/2} v normalized: the eigenvector of the symmetric normalized Laplacian.
  Eigen::VectorXd normalized_eigenvector;
  double eigenvalue = 0.0;
  /// |(D - W) v - lambda D v| / |D v| on the connected vertices.
  double residual = 0.0;
  bool disconnected = false;  ///< split along connected components
  bool fallback = false;      ///< sign split was one-sided; median split used
};

/// Second generalized eigenvector bipartition of the affinity graph of `s`.
///
/// Vertices of zero degree have no neighbor in the graph; they are set aside
/// before the eigensolve and joined to the larger side afterwards. A graph
/// with several connected components is split between the component holding
/// the lowest index and the rest (Ncut value 0).
Bipartition fiedler_bipartition(const SimilarityMatrix& s, SelfLoops loops = SelfLoops::Exclude);
Bipartition fiedler_bipartition(const AffinityGraph& graph);

/// Which cluster the recursive bipartition refines next.
enum class SplitSelection {
  BestNcut,  ///< the cluster whose own bipartition has the smallest Ncut value
  Largest,   ///< the cluster with the most points (lowest id on ties)
};

/// Recursive two-way Ncut until K clusters exist.
ClusterAssignment ncut_recursive(const SimilarityMatrix& s, Index K, SplitSelection selection = SplitSelection::BestNcut,
                                 SelfLoops loops = SelfLoops::Exclude);

/// NJW: rows of the top-K eigenvectors of D^{-1/2} W D^{-1/2}, scaled to unit
/// length, clustered by K-means (kmeans_cfg.K is overridden by K).
ClusterAssignment njw_cluster(const SimilarityMatrix& s, Index K, const KMeansConfig& kmeans_cfg,
                              SelfLoops loops = SelfLoops::Exclude);

/// Ascending eigenvalues of I - D^{-1/2} W D^{-1/2} (isolated vertices contribute 1).
Eigen::VectorXd normalized_laplacian_spectrum(const SimilarityMatrix& s, SelfLoops loops = SelfLoops::Exclude);

/// lambda_{K+1} - lambda_K of the normalized Laplacian (1-based, ascending).
double eigengap(const SimilarityMatrix& s, Index K, SelfLoops loops = SelfLoops::Exclude);

}  // namespace rpf
