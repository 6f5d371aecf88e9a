#pragma once

#include <span>
#include <vector>

#include "rpf/common.hpp"

namespace rpf {

/// Which point pairs count as correctly clustered in the co-cluster accuracy.
enum class PairAgreement {
  Rand,      ///< same-same and different-different pairs (default)
  SameOnly,  ///< only pairs together in both labelings
};

/// l x K table of counts of points with reference label r and predicted label k.
Eigen::MatrixXi contingency(std::span<const int> reference, std::span<const int> predicted);

/// Maximum-weight assignment on a rectangular matrix of nonnegative integer
/// weights. Returns the matched column for each row (-1 for unmatched rows
/// when rows > cols).
std::vector<int> max_weight_assignment(const Eigen::MatrixXi& weights);

/// Best agreement fraction over one-to-one label mappings, computed by
/// optimal assignment on the contingency table (padded when l != K).
double clustering_accuracy(std::span<const int> reference, std::span<const int> predicted);

/// Correct pairs over all n(n-1)/2 unordered pairs.
double cocluster_accuracy(std::span<const int> reference, std::span<const int> predicted,
                          PairAgreement agreement = PairAgreement::Rand);

/// Integer count of correctly clustered pairs (numerator of cocluster_accuracy).
std::uint64_t agreeing_pairs(std::span<const int> reference, std::span<const int> predicted, PairAgreement agreement);

struct MetricReport {
  double rho_c = 0.0;
  double rho_r = 0.0;
  Index n = 0;
  int K = 0;
  int l = 0;
};

MetricReport evaluate(std::span<const int> reference, std::span<const int> predicted,
                      PairAgreement agreement = PairAgreement::Rand);

}  // namespace rpf
