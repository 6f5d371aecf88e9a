#include "rpf/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rpf/parallel.hpp"
#include "rpf/spectral.hpp"

namespace rpf {

namespace {

constexpr double kConvergence = 1e-9;

double squared_distance(const RowMatrix& a, Eigen::Index i, const RowMatrix& b, Eigen::Index j) {
  return (a.row(i) - b.row(j)).squaredNorm();
}

RowMatrix plus_plus_seeds(const RowMatrix& points, Index K, Rng& rng) {
  const Eigen::Index n = points.rows();
  RowMatrix centroids(static_cast<Eigen::Index>(K), points.cols());
  std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
  centroids.row(0) = points.row(pick(rng));
  std::vector<double> nearest(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
  for (Index k = 1; k < K; ++k) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      nearest[static_cast<std::size_t>(i)] = std::min(
          nearest[static_cast<std::size_t>(i)], squared_distance(points, i, centroids, static_cast<Eigen::Index>(k - 1)));
      total += nearest[static_cast<std::size_t>(i)];
    }
    Eigen::Index chosen = 0;
    if (total > 0.0) {
      double target = std::uniform_real_distribution<double>(0.0, total)(rng);
      for (chosen = 0; chosen < n - 1; ++chosen) {
        target -= nearest[static_cast<std::size_t>(chosen)];
        if (target < 0.0) break;
      }
    } else {
      chosen = pick(rng);
    }
    centroids.row(static_cast<Eigen::Index>(k)) = points.row(chosen);
  }
  return centroids;
}

RowMatrix random_partition_seeds(const RowMatrix& points, Index K, Rng& rng) {
  RowMatrix centroids = RowMatrix::Zero(static_cast<Eigen::Index>(K), points.cols());
  std::vector<double> counts(K, 0.0);
  std::uniform_int_distribution<Index> pick(0, K - 1);
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    const Index k = pick(rng);
    centroids.row(static_cast<Eigen::Index>(k)) += points.row(i);
    counts[k] += 1.0;
  }
  for (Index k = 0; k < K; ++k) {
    if (counts[k] > 0.0)
      centroids.row(static_cast<Eigen::Index>(k)) /= counts[k];
    else
      centroids.row(static_cast<Eigen::Index>(k)) = points.row(std::uniform_int_distribution<Eigen::Index>(0, points.rows() - 1)(rng));
  }
  return centroids;
}

double assign(const RowMatrix& points, const RowMatrix& centroids, std::vector<int>& labels, std::vector<double>& dist) {
  double objective = 0.0;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < centroids.rows(); ++k) {
      const double d = squared_distance(points, i, centroids, k);
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(k);
      }
    }
    labels[static_cast<std::size_t>(i)] = best;
    dist[static_cast<std::size_t>(i)] = best_d;
    objective += best_d;
  }
  return objective;
}

/// Moves the farthest point of a multi-point cluster into each empty cluster.
/// Returns the objective after the moves.
double repair_empty(const RowMatrix& points, RowMatrix& centroids, std::vector<int>& labels, std::vector<double>& dist,
                    double objective) {
  const auto K = static_cast<std::size_t>(centroids.rows());
  std::vector<Index> sizes(K, 0);
  for (int l : labels) ++sizes[static_cast<std::size_t>(l)];
  for (std::size_t k = 0; k < K; ++k) {
    if (sizes[k] != 0) continue;
    std::size_t far = labels.size();
    double far_d = -1.0;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (sizes[static_cast<std::size_t>(labels[i])] > 1 && dist[i] > far_d) {
        far_d = dist[i];
        far = i;
      }
    if (far == labels.size()) break;  // fewer points than clusters
    --sizes[static_cast<std::size_t>(labels[far])];
    labels[far] = static_cast<int>(k);
    sizes[k] = 1;
    centroids.row(static_cast<Eigen::Index>(k)) = points.row(static_cast<Eigen::Index>(far));
    objective -= dist[far];
    dist[far] = 0.0;
  }
  return objective;
}

void update_centroids(const RowMatrix& points, RowMatrix& centroids, const std::vector<int>& labels) {
  RowMatrix sums = RowMatrix::Zero(centroids.rows(), centroids.cols());
  std::vector<double> counts(static_cast<std::size_t>(centroids.rows()), 0.0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    sums.row(labels[i]) += points.row(static_cast<Eigen::Index>(i));
    counts[static_cast<std::size_t>(labels[i])] += 1.0;
  }
  for (Eigen::Index k = 0; k < centroids.rows(); ++k)
    if (counts[static_cast<std::size_t>(k)] > 0.0) centroids.row(k) = sums.row(k) / counts[static_cast<std::size_t>(k)];
}

}  // namespace

void KMeansConfig::validate() const {
  if (K < 1) throw ConfigError("K must be at least 1");
  if (max_iterations < 1) throw ConfigError("max_iterations must be positive");
  if (restarts < 1) throw ConfigError("restarts must be positive");
}

KMeansResult lloyd(const RowMatrix& points, RowMatrix centroids, Index max_iterations) {
  const auto n = static_cast<std::size_t>(points.rows());
  if (centroids.rows() < 1 || centroids.cols() != points.cols()) throw ConfigError("centroid shape mismatch");
  if (static_cast<std::size_t>(centroids.rows()) > n) throw ConfigError("K exceeds the number of points");

  KMeansResult result;
  result.labels.assign(n, 0);
  std::vector<double> dist(n, 0.0);
  double objective = assign(points, centroids, result.labels, dist);
  objective = repair_empty(points, centroids, result.labels, dist, objective);
  result.history.push_back(objective);

  for (Index it = 1; it <= max_iterations; ++it) {
    update_centroids(points, centroids, result.labels);
    double next = assign(points, centroids, result.labels, dist);
    next = repair_empty(points, centroids, result.labels, dist, next);
    result.history.push_back(next);
    result.iterations = it;
    const bool converged = std::abs(objective - next) < kConvergence;
    objective = next;
    if (converged) break;
  }
  result.centroids = std::move(centroids);
  result.objective = objective;
  return result;
}

KMeansResult kmeans(const RowMatrix& points, const KMeansConfig& cfg) {
  cfg.validate();
  if (cfg.K > static_cast<Index>(points.rows())) throw ConfigError("K exceeds the number of points");
  std::vector<KMeansResult> runs(cfg.restarts);
  parallel_for(cfg.restarts, [&](Index r) {
    Rng rng = substream(cfg.seed, r);
    RowMatrix seeds = cfg.init == KMeansInit::KMeansPlusPlus ? plus_plus_seeds(points, cfg.K, rng)
                                                              : random_partition_seeds(points, cfg.K, rng);
    runs[r] = lloyd(points, std::move(seeds), cfg.max_iterations);
    runs[r].best_restart = r;
  });
  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r)
    if (runs[r].objective < runs[best].objective) best = r;
  return std::move(runs[best]);
}

KMeansResult kmeans(const DataMatrix& data, const KMeansConfig& cfg) { return kmeans(data.values(), cfg); }

SimilarityMatrix gaussian_kernel(const RowMatrix& points, double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ConfigError("Gaussian bandwidth must be positive");
  const Eigen::Index n = points.rows();
  Eigen::MatrixXd s(n, n);
  const double scale = 1.0 / (2.0 * sigma * sigma);
  for (Eigen::Index i = 0; i < n; ++i) {
    s(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) s(i, j) = s(j, i) = std::exp(-(points.row(i) - points.row(j)).squaredNorm() * scale);
  }
  return SimilarityMatrix(std::move(s));
}

SimilarityMatrix gaussian_kernel(const DataMatrix& data, double sigma) { return gaussian_kernel(data.values(), sigma); }

double median_pairwise_distance(const RowMatrix& points) {
  std::vector<double> d;
  const Eigen::Index n = points.rows();
  if (n < 2) throw ConfigError("need at least two points");
  d.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) d.push_back((points.row(i) - points.row(j)).norm());
  auto mid = d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2);
  std::nth_element(d.begin(), mid, d.end());
  return *mid;
}

std::vector<double> default_sigma_candidates(const RowMatrix& points) {
  double base = median_pairwise_distance(points);
  if (!(base > 0.0)) base = 1.0;
  std::vector<double> out;
  for (int k = -8; k <= 4; ++k) out.push_back(base * std::pow(2.0, k / 2.0));
  return out;
}

SigmaSearchResult sigma_search(const RowMatrix& points, Index K, std::span<const double> candidates) {
  if (candidates.empty()) throw ConfigError("sigma search needs at least one candidate");
  SigmaSearchResult result;
  result.candidates.assign(candidates.begin(), candidates.end());
  result.gaps.resize(candidates.size());
  parallel_for(candidates.size(), [&](Index c) { result.gaps[c] = eigengap(gaussian_kernel(points, candidates[c]), K); });

  std::size_t best = 0;
  for (std::size_t c = 1; c < candidates.size(); ++c) {
    if (result.gaps[c] > result.gaps[best] || (result.gaps[c] == result.gaps[best] && candidates[c] < candidates[best]))
      best = c;
  }
  result.sigma = candidates[best];
  result.eigengap = result.gaps[best];
  return result;
}

}  // namespace rpf
