#include <istream>
#include <ostream>

#include <json.hpp>

#include "rpf/rpforest.hpp"

namespace rpf {

namespace {

constexpr int kForestFormatVersion = 1;

nlohmann::json node_to_json(const RpNode& node) {
  if (node.is_leaf()) return {{"points", node.points}};
  return {{"direction", std::vector<double>(node.direction.begin(), node.direction.end())},
          {"threshold", node.threshold},
          {"left", node.left},
          {"right", node.right}};
}

RpNode node_from_json(const nlohmann::json& j) {
  RpNode node;
  if (j.contains("points")) {
    node.points = j.at("points").get<IndexSet>();
    return node;
  }
  const auto dir = j.at("direction").get<std::vector<double>>();
  node.direction = Eigen::Map<const Eigen::VectorXd>(dir.data(), static_cast<Eigen::Index>(dir.size()));
  node.threshold = j.at("threshold").get<double>();
  node.left = j.at("left").get<int>();
  node.right = j.at("right").get<int>();
  return node;
}

}  // namespace

void save_forest(std::ostream& out, const RpForest& forest) {
  nlohmann::json j;
  j["format"] = "rpforest";
  j["version"] = kForestFormatVersion;
  j["n"] = forest.n;
  j["params"] = {{"trees", forest.params.trees},
                 {"leaf_size", forest.params.leaf_size},
                 {"split_rule", to_string(forest.params.split_rule)},
                 {"seed", forest.params.seed}};
  auto& trees = j["trees"] = nlohmann::json::array();
  for (const auto& tree : forest.trees) {
    auto nodes = nlohmann::json::array();
    for (const auto& node : tree.nodes()) nodes.push_back(node_to_json(node));
    trees.push_back({{"nodes", std::move(nodes)}});
  }
  out << j.dump() << '\n';
}

RpForest load_forest(std::istream& in) {
  nlohmann::json j;
  try {
    in >> j;
    if (j.at("format").get<std::string>() != "rpforest") throw ConfigError("not an rpforest file");
    if (j.at("version").get<int>() != kForestFormatVersion)
      throw ConfigError("unsupported rpforest version " + std::to_string(j.at("version").get<int>()));

    RpForest forest;
    forest.n = j.at("n").get<Index>();
    const auto& params = j.at("params");
    forest.params.trees = params.at("trees").get<Index>();
    forest.params.leaf_size = params.at("leaf_size").get<Index>();
    forest.params.split_rule = split_rule_from_string(params.at("split_rule").get<std::string>());
    forest.params.seed = params.at("seed").get<std::uint64_t>();
    for (const auto& t : j.at("trees")) {
      std::vector<RpNode> nodes;
      for (const auto& nd : t.at("nodes")) nodes.push_back(node_from_json(nd));
      forest.trees.emplace_back(std::move(nodes), forest.n);
    }
    if (forest.trees.size() != forest.params.trees) throw ConfigError("tree count does not match params");
    return forest;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed rpforest file: ") + e.what());
  }
}

}  // namespace rpf
