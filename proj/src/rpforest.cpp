#include "rpf/rpforest.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

#include "rpf/parallel.hpp"

namespace rpf {

std::string to_string(SplitRule rule) {
  switch (rule) {
    case SplitRule::UniformInRange:
      return "uniform";
    case SplitRule::Median:
      return "median";
  }
  return "uniform";
}

SplitRule split_rule_from_string(const std::string& name) {
  if (name == "uniform") return SplitRule::UniformInRange;
  if (name == "median") return SplitRule::Median;
  throw ConfigError("unknown split rule '" + name + "' (expected uniform or median)");
}

void ForestParams::validate() const {
  if (trees < 1) throw ConfigError("tree count must be at least 1");
  if (leaf_size < 2) throw ConfigError("node-splitting threshold n_s must be at least 2");
}

Eigen::VectorXd random_direction(Index dim, Rng& rng) {
  if (dim < 1) throw ConfigError("direction dimension must be at least 1");
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(static_cast<Eigen::Index>(dim));
  double norm = 0.0;
  do {
    for (auto& x : v) x = normal(rng);
    norm = v.norm();
  } while (!(norm > 1e-300));
  return v / norm;
}

namespace {

double median_of(std::vector<double> values) {
  const std::size_t m = values.size();
  auto mid = values.begin() + static_cast<std::ptrdiff_t>(m / 2);
  std::nth_element(values.begin(), mid, values.end());
  if (m % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(values.begin(), mid);
  return lower + (upper - lower) / 2.0;
}

}  // namespace

std::optional<Split> split_node(std::span<const Index> points, const RowMatrix& data, SplitRule rule, Rng& rng,
                                int attempts) {
  if (points.size() < 2) return std::nullopt;
  const auto dim = static_cast<Index>(data.cols());
  std::vector<double> proj(points.size());

  for (int attempt = 0; attempt < attempts; ++attempt) {
    Eigen::VectorXd dir = random_direction(dim, rng);
    for (std::size_t k = 0; k < points.size(); ++k) proj[k] = data.row(static_cast<Eigen::Index>(points[k])).dot(dir);
    const auto [lo_it, hi_it] = std::minmax_element(proj.begin(), proj.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    if (!(hi > lo)) continue;

    double c = 0.0;
    if (rule == SplitRule::Median) c = median_of(proj);
    if (rule == SplitRule::UniformInRange || !(c > lo)) c = std::uniform_real_distribution<double>(lo, hi)(rng);
    // uniform_real_distribution is half-open; c == lo would leave the left child empty.
    if (!(c > lo)) continue;

    Split split;
    split.direction = std::move(dir);
    split.threshold = c;
    for (std::size_t k = 0; k < points.size(); ++k) (proj[k] < c ? split.left : split.right).push_back(points[k]);
    if (split.left.empty() || split.right.empty()) continue;
    return split;
  }
  return std::nullopt;
}

RpTree::RpTree(std::vector<RpNode> nodes, Index n) : nodes_(std::move(nodes)), n_(n) {
  if (nodes_.empty()) throw ConfigError("tree must have a root node");
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& node = nodes_[i];
    if ((node.left < 0) != (node.right < 0)) throw ConfigError("tree node must have zero or two children");
    if (node.left >= 0 && (static_cast<std::size_t>(node.left) <= i || static_cast<std::size_t>(node.right) <= i ||
                           static_cast<std::size_t>(node.left) >= nodes_.size() ||
                           static_cast<std::size_t>(node.right) >= nodes_.size()))
      throw ConfigError("tree child index out of order");
  }
  std::vector<char> seen(n_, 0);
  for (const auto& node : nodes_) {
    if (!node.is_leaf()) continue;
    for (Index i : node.points) {
      if (i >= n_ || seen[i]) throw ConfigError("tree leaves do not partition the points");
      seen[i] = 1;
    }
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end()) throw ConfigError("tree leaves do not partition the points");
}

Index RpTree::leaf_count() const {
  return static_cast<Index>(std::count_if(nodes_.begin(), nodes_.end(), [](const RpNode& nd) { return nd.is_leaf(); }));
}

Index RpTree::depth() const {
  std::vector<Index> level(nodes_.size(), 0);
  Index deepest = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    deepest = std::max(deepest, level[i]);
    if (!nodes_[i].is_leaf()) {
      level[static_cast<std::size_t>(nodes_[i].left)] = level[i] + 1;
      level[static_cast<std::size_t>(nodes_[i].right)] = level[i] + 1;
    }
  }
  return deepest;
}

std::vector<IndexSet> RpTree::leaf_partition() const {
  std::vector<IndexSet> leaves;
  if (nodes_.empty()) return leaves;
  std::vector<int> stack{0};
  while (!stack.empty()) {
    const auto& node = nodes_[static_cast<std::size_t>(stack.back())];
    stack.pop_back();
    if (node.is_leaf()) {
      leaves.push_back(node.points);
    } else {
      stack.push_back(node.right);
      stack.push_back(node.left);
    }
  }
  return leaves;
}

std::vector<int> RpTree::leaf_of_points() const {
  std::vector<int> owner(n_, -1);
  const auto leaves = leaf_partition();
  for (std::size_t l = 0; l < leaves.size(); ++l)
    for (Index i : leaves[l]) owner[i] = static_cast<int>(l);
  return owner;
}

std::vector<IndexSet> leaf_partition(const RpTree& tree) { return tree.leaf_partition(); }

RpTree grow_tree(const DataMatrix& data, const ForestParams& params, Rng& rng) {
  return grow_tree(data.values(), params, rng);
}

RpTree grow_tree(const RowMatrix& data, const ForestParams& params, Rng& rng) {
  params.validate();
  const auto n = static_cast<Index>(data.rows());
  if (n < 1) throw ConfigError("cannot grow a tree on an empty data set");

  std::vector<RpNode> nodes(1);
  nodes[0].points.resize(n);
  std::iota(nodes[0].points.begin(), nodes[0].points.end(), Index{0});

  std::deque<std::size_t> pending{0};
  while (!pending.empty()) {
    const std::size_t id = pending.front();
    pending.pop_front();
    if (nodes[id].points.size() < params.leaf_size) continue;
    auto split = split_node(nodes[id].points, data, params.split_rule, rng);
    if (!split) continue;

    const auto left = static_cast<int>(nodes.size());
    nodes.push_back(RpNode{std::move(split->left), {}, 0.0, -1, -1});
    nodes.push_back(RpNode{std::move(split->right), {}, 0.0, -1, -1});
    auto& parent = nodes[id];
    parent.direction = std::move(split->direction);
    parent.threshold = split->threshold;
    parent.left = left;
    parent.right = left + 1;
    IndexSet().swap(parent.points);
    pending.push_back(static_cast<std::size_t>(left));
    pending.push_back(static_cast<std::size_t>(left + 1));
  }
  return RpTree(std::move(nodes), n);
}

Rng tree_stream(std::uint64_t seed, Index tree) { return substream(seed, static_cast<std::uint64_t>(tree)); }

RpForest grow_forest(const DataMatrix& data, const ForestParams& params) { return grow_forest(data.values(), params); }

RpForest grow_forest(const RowMatrix& data, const ForestParams& params) {
  params.validate();
  RpForest forest;
  forest.n = static_cast<Index>(data.rows());
  forest.params = params;
  forest.trees.resize(params.trees);
  parallel_for(params.trees, [&](Index t) {
    Rng rng = tree_stream(params.seed, t);
    forest.trees[t] = grow_tree(data, params, rng);
  });
  return forest;
}

bool check_tree_invariants(const RpTree& tree, const RowMatrix& data, Index leaf_size, std::string* why) {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  const Index n = tree.size();
  if (static_cast<Index>(data.rows()) != n) return fail("tree size does not match data");
  std::vector<int> hits(n, 0);
  for (const auto& leaf : tree.leaf_partition()) {
    if (leaf.empty()) return fail("empty leaf");
    for (Index i : leaf) {
      if (i >= n) return fail("leaf index out of range");
      if (hits[i]++) return fail("point " + std::to_string(i) + " appears in two leaves");
    }
    if (leaf.size() >= leaf_size) {
      const auto first = data.row(static_cast<Eigen::Index>(leaf.front()));
      for (Index i : leaf)
        if (data.row(static_cast<Eigen::Index>(i)) != first)
          return fail("leaf of size " + std::to_string(leaf.size()) + " >= n_s holds distinct points");
    }
  }
  for (Index i = 0; i < n; ++i)
    if (!hits[i]) return fail("point " + std::to_string(i) + " missing from every leaf");
  return true;
}

}  // namespace rpf
