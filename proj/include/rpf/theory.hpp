#pragma once

#include <string>
#include <utility>
#include <vector>

#include "rpf/common.hpp"
#include "rpf/rpforest.hpp"

namespace rpf {

struct StretchReport {
  /// Principal stretch: the largest projected range over all directions,
  /// which equals the largest pairwise distance.
  double rho = 0.0;
  std::pair<Index, Index> achieving_pair{0, 0};
  /// Smallest projected range over the sampled directions; an upper bound on
  /// the neck size.
  double neck_estimate = 0.0;
  Index neck_directions_sampled = 0;
};

/// Range of the projections of `points` onto the unit vector `direction`.
double projected_range(const RowMatrix& points, const Eigen::VectorXd& direction);

/// Exact rho by a pairwise scan; neck estimated from `neck_directions` random
/// directions plus the smallest-variance principal axis.
StretchReport principal_stretch(const RowMatrix& points, Index neck_directions = 10000, std::uint64_t seed = 0);

struct SeparationExperiment {
  Index a = 0;
  Index b = 0;
  Index trials = 0;
  Index separated = 0;
  Index degenerate = 0;  ///< trials in which split_node found no split
  double distance = 0.0;
  double rho = 0.0;
  double empirical_probability = 0.0;
  double bound = 0.0;  ///< 2 d / (pi rho)
  /// E|cos theta| d / rho for an isotropic direction in R^p; equals bound when p = 2.
  double corrected_bound = 0.0;
  double standard_error = 0.0;
  /// empirical >= bound - 3 SE
  bool bound_holds = false;
};

/// Monte Carlo estimate of the probability that one split_node call on the
/// whole point set sends a and b to different children. Trials run in blocks
/// of 1024 with one random substream per block, so results do not depend on
/// the thread count. Throws ConfigError if every point is identical.
SeparationExperiment separation_probability(const RowMatrix& points, Index a, Index b, SplitRule rule, Index trials,
                                            std::uint64_t seed);

struct BatteryCase {
  std::string name;
  RowMatrix points;
  Index a = 0;
  Index b = 0;
};

/// Mean of |<u, e>| for u uniform on the unit sphere in R^p and a fixed unit e.
double mean_abs_cosine(Index p);

/// 20 fixed (node, pair) configurations: five point-set shapes in each of
/// dimensions 1, 2, 5 and 20. The shapes span at most two affine dimensions
/// (1 when p = 1) and are placed in R^p by a random orthonormal frame, so the
/// angle between a random direction and AB is uniform as the 2/pi bound needs.
std::vector<BatteryCase> separation_battery(std::uint64_t seed = 2024);

/// Full-dimensional versions of the same shapes in R^5 and R^20. Here the
/// 2/pi bound can fail; corrected_bound is the one that applies.
std::vector<BatteryCase> generic_battery(std::uint64_t seed = 2024);

struct BatteryResult {
  std::string name;
  Index dim = 0;
  SeparationExperiment experiment;
};

std::vector<BatteryResult> run_battery(const std::vector<BatteryCase>& cases, SplitRule rule, Index trials,
                                       std::uint64_t seed);

/// Normal approximation P(Z >= (1 - delta - mu) sqrt(T) / sigma) of the
/// probability that a pair separated in a tree with probability mu ends with
/// similarity at most delta in a forest of T trees.
double normal_tail_probability(double delta, double mu, Index trees);

struct TailCheck {
  double delta = 0.0;
  double empirical = 0.0;  ///< fraction of forests with S_AB <= delta
  double normal_approximation = 0.0;
};

struct ForestSpread {
  Index trees = 0;
  std::vector<double> similarities;  ///< S_AB of each replicate forest
  double mean = 0.0;
  double sd = 0.0;            ///< sample sd over replicates
  double binomial_sd = 0.0;   ///< sqrt(q (1 - q) / T) with q the pooled mean
  std::vector<TailCheck> tails;
};

struct TreeSeparationReport {
  Index a = 0;
  Index b = 0;
  double distance = 0.0;
  double rho = 0.0;
  double root_bound = 0.0;  ///< 2 d / (pi rho) over the whole data
  Index single_trees = 0;
  double separation_frequency = 0.0;  ///< fraction of single trees separating the pair
  std::vector<ForestSpread> forests;
  /// Least squares slope of log sd against log T (NaN if any sd is zero).
  double fitted_exponent = 0.0;
};

/// Grows `replicates` single trees and `replicates` forests for each size in
/// `forest_sizes`. Replicate r uses seed mix64(seed + r), so the forest of
/// size 200 is a prefix of the forest of size 400 for the same replicate.
TreeSeparationReport tree_separation_curve(const RowMatrix& data, const ForestParams& params, Index a, Index b,
                                           Index replicates, const std::vector<Index>& forest_sizes,
                                           const std::vector<double>& deltas = {0.05, 0.1, 0.2});

/// Principal stretch shrink factors (child rho / parent rho) and split
/// counts (leaf depths) measured on grown trees.
struct ShrinkageStats {
  double gamma_min = 0.0;
  double gamma_max = 0.0;
  double gamma_mean = 0.0;
  Index splits_min = 0;  ///< J_1
  Index splits_max = 0;  ///< J_2
  Index nodes_measured = 0;
};

ShrinkageStats measure_shrinkage(const RowMatrix& data, const ForestParams& params, Index trees);

/// 2 d / (pi rho gamma2^(J1 - 1)), capped at 1.
double tree_separation_lower_bound(double distance, double rho, double gamma_max, Index splits_min);

}  // namespace rpf
