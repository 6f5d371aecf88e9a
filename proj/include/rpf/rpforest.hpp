#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rpf/common.hpp"
#include "rpf/dataset.hpp"

namespace rpf {

enum class SplitRule {
  UniformInRange,  ///< c ~ Uniform[min, max] of the projections
  Median,          ///< c = median of the projections
};

std::string to_string(SplitRule rule);
SplitRule split_rule_from_string(const std::string& name);

struct ForestParams {
  Index trees = 400;
  /// n_s: a node with fewer points than this is never split.
  Index leaf_size = 30;
  SplitRule split_rule = SplitRule::UniformInRange;
  std::uint64_t seed = 0;

  /// Throws ConfigError unless trees >= 1 and leaf_size >= 2.
  void validate() const;
};

/// Resampling budget for a split that leaves one child empty.
inline constexpr int kSplitAttempts = 20;

/// Isotropic unit vector: a standard normal draw, normalized.
Eigen::VectorXd random_direction(Index dim, Rng& rng);

struct Split {
  Eigen::VectorXd direction;
  double threshold = 0.0;
  IndexSet left;   ///< projection < threshold
  IndexSet right;  ///< projection >= threshold
};

/// One random projection split of `points` (row indices into `data`).
///
/// Returns std::nullopt (degenerate) if no attempt within `attempts` yields
/// two nonempty children, which is always the case for identical points.
/// Under the median rule an attempt whose median equals the minimum
/// projection falls back to a uniform draw for that attempt.
std::optional<Split> split_node(std::span<const Index> points, const RowMatrix& data, SplitRule rule, Rng& rng,
                                int attempts = kSplitAttempts);

struct RpNode {
  IndexSet points;  ///< populated on leaves only
  Eigen::VectorXd direction;
  double threshold = 0.0;
  int left = -1;
  int right = -1;

  bool is_leaf() const noexcept { return left < 0; }
};

/// Flat binary tree; node 0 is the root and children always follow their parent.
class RpTree {
 public:
  RpTree() = default;
  RpTree(std::vector<RpNode> nodes, Index n);

  const std::vector<RpNode>& nodes() const noexcept { return nodes_; }
  Index size() const noexcept { return n_; }
  Index leaf_count() const;
  Index depth() const;

  /// Leaf index sets in left-to-right order.
  std::vector<IndexSet> leaf_partition() const;
  /// leaf id (position in leaf_partition order) for every point.
  std::vector<int> leaf_of_points() const;

 private:
  std::vector<RpNode> nodes_;
  Index n_ = 0;
};

/// Recursive growth with a FIFO working set until every pending node has
/// fewer than leaf_size points or cannot be split.
RpTree grow_tree(const DataMatrix& data, const ForestParams& params, Rng& rng);
RpTree grow_tree(const RowMatrix& data, const ForestParams& params, Rng& rng);

/// Random stream used for tree `tree` of a forest seeded with `seed`.
Rng tree_stream(std::uint64_t seed, Index tree);

struct RpForest {
  std::vector<RpTree> trees;
  Index n = 0;
  ForestParams params;
};

/// Grows params.trees trees in parallel; tree t uses tree_stream(seed, t), so
/// the result is identical for any thread count.
RpForest grow_forest(const DataMatrix& data, const ForestParams& params);
RpForest grow_forest(const RowMatrix& data, const ForestParams& params);

std::vector<IndexSet> leaf_partition(const RpTree& tree);

/// True when the leaves partition {0..n-1} and each leaf has fewer than
/// leaf_size points or consists of identical rows. `why` receives the first
/// violation.
bool check_tree_invariants(const RpTree& tree, const RowMatrix& data, Index leaf_size, std::string* why = nullptr);

/// JSON forest format, version 1 (see docs/formats.md).
void save_forest(std::ostream& out, const RpForest& forest);
RpForest load_forest(std::istream& in);

}  // namespace rpf
