#include "rpf/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "rpf/parallel.hpp"

namespace rpf {

namespace {

constexpr Index kTrialBlock = 1024;

struct Diameter {
  double rho = 0.0;
  Index i = 0;
  Index j = 0;
};

Diameter diameter(const RowMatrix& points, std::span<const Index> subset) {
  Diameter best;
  double best_sq = -1.0;
  for (Index x = 0; x < subset.size(); ++x)
    for (Index y = x + 1; y < subset.size(); ++y) {
      const double sq = (points.row(subset[x]) - points.row(subset[y])).squaredNorm();
      if (sq > best_sq) {
        best_sq = sq;
        best = {0.0, subset[x], subset[y]};
      }
    }
  best.rho = std::sqrt(std::max(best_sq, 0.0));
  return best;
}

IndexSet iota_set(Index n) {
  IndexSet all(n);
  std::iota(all.begin(), all.end(), Index{0});
  return all;
}

bool contains(const IndexSet& set, Index value) { return std::find(set.begin(), set.end(), value) != set.end(); }

double sample_sd(std::span<const double> values, double mean) {
  if (values.size() < 2) return 0.0;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

RowMatrix uniform_cube(Index m, Index p, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  RowMatrix x(m, p);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < p; ++j) x(i, j) = unif(rng);
  return x;
}

RowMatrix gaussian_cloud(Index m, Index p, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  RowMatrix x(m, p);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < p; ++j) x(i, j) = normal(rng);
  return x;
}

std::pair<Index, Index> closest_pair(const RowMatrix& x) {
  std::pair<Index, Index> best{0, 1};
  double best_sq = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < static_cast<Index>(x.rows()); ++i)
    for (Index j = i + 1; j < static_cast<Index>(x.rows()); ++j) {
      const double sq = (x.row(i) - x.row(j)).squaredNorm();
      if (sq < best_sq) {
        best_sq = sq;
        best = {i, j};
      }
    }
  return best;
}

std::vector<BatteryCase> battery_shapes(Index p, Rng& rng) {
  std::vector<BatteryCase> cases;
  {
    BatteryCase c{"two-points", RowMatrix(2, p), 0, 1};
    c.points.row(0).setZero();
    c.points.row(1).setOnes();
    cases.push_back(std::move(c));
  }
  {
    RowMatrix x = uniform_cube(60, p, rng);
    const Diameter d = diameter(x, iota_set(60));
    cases.push_back({"cube-diameter", std::move(x), d.i, d.j});
  }
  {
    RowMatrix x = uniform_cube(60, p, rng);
    const auto [i, j] = closest_pair(x);
    cases.push_back({"cube-closest", std::move(x), i, j});
  }
  cases.push_back({"gaussian-pair", gaussian_cloud(100, p, rng), 0, 1});
  {
    // two blobs 4 apart along the first axis; one point from each
    RowMatrix x = 0.3 * gaussian_cloud(80, p, rng);
    x.block(0, 0, 40, 1).array() -= 2.0;
    x.block(40, 0, 40, 1).array() += 2.0;
    cases.push_back({"two-blobs-across", std::move(x), 0, 40});
  }
  return cases;
}

}  // namespace

double mean_abs_cosine(Index p) {
  if (p < 1) throw ConfigError("dimension must be positive");
  const double x = static_cast<double>(p);
  return std::exp(std::lgamma(x / 2.0) - std::lgamma((x + 1.0) / 2.0)) / std::sqrt(std::numbers::pi);
}

double projected_range(const RowMatrix& points, const Eigen::VectorXd& direction) {
  if (points.rows() == 0) return 0.0;
  const Eigen::VectorXd proj = points * direction;
  return proj.maxCoeff() - proj.minCoeff();
}

StretchReport principal_stretch(const RowMatrix& points, Index neck_directions, std::uint64_t seed) {
  if (points.rows() < 2) throw ConfigError("principal stretch needs at least two points");
  const IndexSet all = iota_set(static_cast<Index>(points.rows()));
  const Diameter d = diameter(points, all);

  StretchReport report;
  report.rho = d.rho;
  report.achieving_pair = {d.i, d.j};

  const Index p = static_cast<Index>(points.cols());
  double neck = std::numeric_limits<double>::infinity();
  Rng rng = substream(seed, 0);
  for (Index k = 0; k < neck_directions; ++k) neck = std::min(neck, projected_range(points, random_direction(p, rng)));

  // smallest-variance principal axis
  const RowMatrix centered = points.rowwise() - points.colwise().mean();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(centered.transpose() * centered);
  if (eig.info() == Eigen::Success) neck = std::min(neck, projected_range(points, eig.eigenvectors().col(0)));

  // can exceed rho only by rounding
  report.neck_estimate = std::min(neck, report.rho);
  report.neck_directions_sampled = neck_directions + 1;
  return report;
}

SeparationExperiment separation_probability(const RowMatrix& points, Index a, Index b, SplitRule rule, Index trials,
                                            std::uint64_t seed) {
  const Index n = static_cast<Index>(points.rows());
  if (n < 2) throw ConfigError("separation experiment needs at least two points");
  if (a >= n || b >= n) throw ConfigError("pair index out of range");
  if (trials < 1) throw ConfigError("trials must be at least 1");
  bool identical = true;
  for (Index i = 1; i < n && identical; ++i) identical = points.row(i) == points.row(0);
  if (identical) throw ConfigError("degenerate node: all points identical");

  const IndexSet all = iota_set(n);
  const Index blocks = (trials + kTrialBlock - 1) / kTrialBlock;
  std::vector<Index> separated(blocks, 0), degenerate(blocks, 0);
  parallel_for(blocks, [&](Index blk) {
    Rng rng = substream(seed, blk);
    const Index end = std::min(trials, (blk + 1) * kTrialBlock);
    for (Index t = blk * kTrialBlock; t < end; ++t) {
      const auto split = split_node(all, points, rule, rng);
      if (!split) {
        ++degenerate[blk];
        continue;
      }
      if (contains(split->left, a) != contains(split->left, b)) ++separated[blk];
    }
  });

  SeparationExperiment ex;
  ex.a = a;
  ex.b = b;
  ex.trials = trials;
  ex.separated = std::accumulate(separated.begin(), separated.end(), Index{0});
  ex.degenerate = std::accumulate(degenerate.begin(), degenerate.end(), Index{0});
  ex.distance = (points.row(a) - points.row(b)).norm();
  ex.rho = diameter(points, all).rho;
  ex.empirical_probability = static_cast<double>(ex.separated) / static_cast<double>(trials);
  ex.bound = 2.0 * ex.distance / (std::numbers::pi * ex.rho);
  ex.corrected_bound = mean_abs_cosine(static_cast<Index>(points.cols())) * ex.distance / ex.rho;
  const double q = ex.empirical_probability;
  ex.standard_error = std::sqrt(q * (1.0 - q) / static_cast<double>(trials));
  ex.bound_holds = ex.empirical_probability >= ex.bound - 3.0 * ex.standard_error;
  return ex;
}

std::vector<BatteryCase> separation_battery(std::uint64_t seed) {
  std::vector<BatteryCase> cases;
  const Index dims[] = {1, 2, 5, 20};
  for (Index di = 0; di < 4; ++di) {
    const Index p = dims[di];
    Rng rng = substream(seed, di);
    const Index q = std::min<Index>(p, 2);
    // orthonormal p x q frame and offset
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(gaussian_cloud(p, q, rng));
    const Eigen::MatrixXd frame = qr.householderQ() * Eigen::MatrixXd::Identity(p, q);
    const Eigen::RowVectorXd offset = gaussian_cloud(1, p, rng);
    for (auto& c : battery_shapes(q, rng)) {
      c.name = "p" + std::to_string(p) + "/" + c.name;
      c.points = RowMatrix((c.points * frame.transpose()).rowwise() + offset);
      cases.push_back(std::move(c));
    }
  }
  return cases;
}

std::vector<BatteryCase> generic_battery(std::uint64_t seed) {
  std::vector<BatteryCase> cases;
  for (Index p : {Index{5}, Index{20}}) {
    Rng rng = substream(seed, 100 + p);
    for (auto& c : battery_shapes(p, rng)) {
      c.name = "p" + std::to_string(p) + "-full/" + c.name;
      cases.push_back(std::move(c));
    }
  }
  return cases;
}

std::vector<BatteryResult> run_battery(const std::vector<BatteryCase>& cases, SplitRule rule, Index trials,
                                       std::uint64_t seed) {
  std::vector<BatteryResult> results;
  results.reserve(cases.size());
  for (Index k = 0; k < cases.size(); ++k) {
    const auto& c = cases[k];
    results.push_back({c.name, static_cast<Index>(c.points.cols()),
                       separation_probability(c.points, c.a, c.b, rule, trials, mix64(seed + k))});
  }
  return results;
}

double normal_tail_probability(double delta, double mu, Index trees) {
  // S <= delta  <=>  separations >= (1 - delta) T
  const double gap = 1.0 - delta - mu;
  const double sigma = std::sqrt(mu * (1.0 - mu));
  if (sigma == 0.0) return gap <= 0.0 ? 1.0 : 0.0;
  const double z = gap * std::sqrt(static_cast<double>(trees)) / sigma;
  return 0.5 * std::erfc(z / std::numbers::sqrt2);
}

TreeSeparationReport tree_separation_curve(const RowMatrix& data, const ForestParams& params, Index a, Index b,
                                           Index replicates, const std::vector<Index>& forest_sizes,
                                           const std::vector<double>& deltas) {
  params.validate();
  const Index n = static_cast<Index>(data.rows());
  if (replicates < 30) throw ConfigError("tree_separation_curve needs at least 30 replicates");
  if (a >= n || b >= n) throw ConfigError("pair index out of range");
  if (forest_sizes.empty()) throw ConfigError("no forest sizes given");

  auto together = [&](const RpTree& tree) {
    const auto leaf = tree.leaf_of_points();
    return leaf[a] == leaf[b];
  };

  TreeSeparationReport report;
  report.a = a;
  report.b = b;
  report.distance = (data.row(a) - data.row(b)).norm();
  report.rho = n >= 2 ? diameter(data, iota_set(n)).rho : 0.0;
  report.root_bound = report.rho > 0.0 ? 2.0 * report.distance / (std::numbers::pi * report.rho) : 0.0;

  // single trees: replicate r, tree 0
  std::vector<char> split_single(replicates, 0);
  parallel_for(replicates, [&](Index r) {
    Rng rng = tree_stream(mix64(params.seed + r), 0);
    split_single[r] = !together(grow_tree(data, params, rng));
  });
  report.single_trees = replicates;
  report.separation_frequency =
      static_cast<double>(std::count(split_single.begin(), split_single.end(), 1)) / static_cast<double>(replicates);

  // nested forests: co-occurrence indicator for every (replicate, tree) up to the largest size
  const Index max_trees = *std::max_element(forest_sizes.begin(), forest_sizes.end());
  std::vector<char> co(replicates * max_trees, 0);
  parallel_for(replicates * max_trees, [&](Index job) {
    const Index r = job / max_trees;
    const Index t = job % max_trees;
    Rng rng = tree_stream(mix64(params.seed + r), t);
    co[job] = together(grow_tree(data, params, rng));
  });

  std::vector<double> log_t, log_sd;
  bool any_zero = false;
  for (Index trees : forest_sizes) {
    if (trees < 1) throw ConfigError("forest sizes must be positive");
    ForestSpread spread;
    spread.trees = trees;
    for (Index r = 0; r < replicates; ++r) {
      const auto first = co.begin() + static_cast<std::ptrdiff_t>(r * max_trees);
      spread.similarities.push_back(static_cast<double>(std::count(first, first + static_cast<std::ptrdiff_t>(trees), 1)) /
                                    static_cast<double>(trees));
    }
    spread.mean = std::accumulate(spread.similarities.begin(), spread.similarities.end(), 0.0) / replicates;
    spread.sd = sample_sd(spread.similarities, spread.mean);
    spread.binomial_sd = std::sqrt(spread.mean * (1.0 - spread.mean) / static_cast<double>(trees));
    const double mu = 1.0 - spread.mean;
    for (double delta : deltas) {
      TailCheck tail;
      tail.delta = delta;
      tail.empirical = static_cast<double>(std::count_if(spread.similarities.begin(), spread.similarities.end(),
                                                         [&](double s) { return s <= delta; })) /
                       static_cast<double>(replicates);
      tail.normal_approximation = normal_tail_probability(delta, mu, trees);
      spread.tails.push_back(tail);
    }
    if (spread.sd <= 0.0) any_zero = true;
    log_t.push_back(std::log(static_cast<double>(trees)));
    log_sd.push_back(spread.sd > 0.0 ? std::log(spread.sd) : 0.0);
    report.forests.push_back(std::move(spread));
  }

  if (any_zero || log_t.size() < 2) {
    report.fitted_exponent = std::numeric_limits<double>::quiet_NaN();
  } else {
    const double mx = std::accumulate(log_t.begin(), log_t.end(), 0.0) / log_t.size();
    const double my = std::accumulate(log_sd.begin(), log_sd.end(), 0.0) / log_sd.size();
    double sxy = 0.0, sxx = 0.0;
    for (Index k = 0; k < log_t.size(); ++k) {
      sxy += (log_t[k] - mx) * (log_sd[k] - my);
      sxx += (log_t[k] - mx) * (log_t[k] - mx);
    }
    report.fitted_exponent = sxx > 0.0 ? sxy / sxx : std::numeric_limits<double>::quiet_NaN();
  }
  return report;
}

ShrinkageStats measure_shrinkage(const RowMatrix& data, const ForestParams& params, Index trees) {
  params.validate();
  if (trees < 1) throw ConfigError("trees must be at least 1");
  std::vector<std::vector<double>> ratios(trees);
  std::vector<std::vector<Index>> depths(trees);

  parallel_for(trees, [&](Index t) {
    Rng rng = tree_stream(params.seed, t);
    const RpTree tree = grow_tree(data, params, rng);
    const auto& nodes = tree.nodes();
    // children follow parents, so a reverse sweep collects subtree points
    std::vector<IndexSet> members(nodes.size());
    for (Index k = nodes.size(); k-- > 0;) {
      if (nodes[k].is_leaf()) {
        members[k] = nodes[k].points;
      } else {
        members[k] = members[nodes[k].left];
        members[k].insert(members[k].end(), members[nodes[k].right].begin(), members[nodes[k].right].end());
      }
    }
    std::vector<double> rho(nodes.size());
    for (Index k = 0; k < nodes.size(); ++k) rho[k] = diameter(data, members[k]).rho;

    std::vector<Index> depth(nodes.size(), 0);
    for (Index k = 0; k < nodes.size(); ++k) {
      if (nodes[k].is_leaf()) {
        depths[t].push_back(depth[k]);
        continue;
      }
      for (int child : {nodes[k].left, nodes[k].right}) {
        depth[child] = depth[k] + 1;
        if (rho[k] > 0.0) ratios[t].push_back(rho[child] / rho[k]);
      }
    }
  });

  ShrinkageStats stats;
  stats.gamma_min = std::numeric_limits<double>::infinity();
  stats.splits_min = std::numeric_limits<Index>::max();
  double sum = 0.0;
  for (Index t = 0; t < trees; ++t) {
    for (double r : ratios[t]) {
      stats.gamma_min = std::min(stats.gamma_min, r);
      stats.gamma_max = std::max(stats.gamma_max, r);
      sum += r;
      ++stats.nodes_measured;
    }
    for (Index d : depths[t]) {
      stats.splits_min = std::min(stats.splits_min, d);
      stats.splits_max = std::max(stats.splits_max, d);
    }
  }
  if (stats.nodes_measured == 0) stats.gamma_min = 0.0;
  stats.gamma_mean = stats.nodes_measured ? sum / static_cast<double>(stats.nodes_measured) : 0.0;
  return stats;
}

double tree_separation_lower_bound(double distance, double rho, double gamma_max, Index splits_min) {
  if (!(rho > 0.0)) return 0.0;
  const double shrink = splits_min >= 1 ? std::pow(gamma_max, static_cast<double>(splits_min - 1)) : 1.0;
  if (!(shrink > 0.0)) return 1.0;
  return std::min(1.0, 2.0 * distance / (std::numbers::pi * rho * shrink));
}

}  // namespace rpf
