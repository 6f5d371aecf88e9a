#include "rpf/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <optional>

#include <Eigen/Eigenvalues>

namespace rpf {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

auto ei(Index i) { return static_cast<Eigen::Index>(i); }

std::vector<char> membership(Index n, std::span<const Index> set, const char* what) {
  std::vector<char> in(n, 0);
  for (Index i : set) {
    if (i >= n) throw ConfigError(std::string(what) + " index out of range");
    in[i] = 1;
  }
  return in;
}

MatrixXd submatrix(const MatrixXd& m, std::span<const Index> idx) {
  MatrixXd out(ei(idx.size()), ei(idx.size()));
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = 0; b < idx.size(); ++b) out(ei(a), ei(b)) = m(ei(idx[a]), ei(idx[b]));
  return out;
}

AffinityGraph graph_from_weights(MatrixXd weights) {
  AffinityGraph g;
  g.degree = weights.rowwise().sum();
  g.weights = std::move(weights);
  return g;
}

/// Ncut with an empty-volume part counted as fully cut (term 1).
double guarded_ncut(const MatrixXd& w, std::span<const IndexSet> parts) {
  const VectorXd degree = w.rowwise().sum();
  double total = 0.0;
  for (const auto& part : parts) {
    double vol = 0.0;
    double assoc = 0.0;
    for (Index i : part) {
      vol += degree(ei(i));
      for (Index j : part) assoc += w(ei(i), ei(j));
    }
    total += vol > 0.0 ? (vol - assoc) / vol : 1.0;
  }
  return total;
}

/// Connected components over positive off-diagonal weights, each listed in
/// ascending order, components ordered by their lowest member.
std::vector<IndexSet> components(const MatrixXd& w) {
  const auto n = static_cast<Index>(w.rows());
  std::vector<int> comp(n, -1);
  std::vector<IndexSet> out;
  for (Index start = 0; start < n; ++start) {
    if (comp[start] >= 0) continue;
    const int id = static_cast<int>(out.size());
    IndexSet members{start};
    comp[start] = id;
    for (std::size_t head = 0; head < members.size(); ++head) {
      const Index i = members[head];
      for (Index j = 0; j < n; ++j)
        if (j != i && comp[j] < 0 && w(ei(i), ei(j)) > 0.0) {
          comp[j] = id;
          members.push_back(j);
        }
    }
    std::sort(members.begin(), members.end());
    out.push_back(std::move(members));
  }
  return out;
}

void orient(VectorXd& v, VectorXd* companion = nullptr) {
  Eigen::Index arg = 0;
  v.cwiseAbs().maxCoeff(&arg);
  if (v(arg) < 0.0) {
    v = -v;
    if (companion) *companion = -*companion;
  }
}

}  // namespace

AffinityGraph make_affinity_graph(const SimilarityMatrix& s, SelfLoops loops) {
  MatrixXd w = s.matrix();
  if ((w.array() < 0.0).any()) throw ConfigError("affinity weights must be nonnegative");
  if (loops == SelfLoops::Exclude) w.diagonal().setZero();
  return graph_from_weights(std::move(w));
}

ClusterAssignment ClusterAssignment::from_labels(std::span<const int> raw) {
  ClusterAssignment out;
  std::map<int, int> remap;
  out.labels.reserve(raw.size());
  for (int l : raw) {
    if (l < 0) throw ConfigError("cluster ids must be nonnegative");
    auto [it, inserted] = remap.try_emplace(l, static_cast<int>(remap.size()));
    out.labels.push_back(it->second);
  }
  out.K = static_cast<int>(remap.size());
  return out;
}

std::vector<IndexSet> ClusterAssignment::clusters() const {
  std::vector<IndexSet> out(static_cast<std::size_t>(K));
  for (std::size_t i = 0; i < labels.size(); ++i) out[static_cast<std::size_t>(labels[i])].push_back(i);
  return out;
}

double cut_size(const SimilarityMatrix& s, std::span<const Index> v1, std::span<const Index> v2) {
  const auto in1 = membership(s.size(), v1, "cut");
  for (Index j : v2) {
    if (j >= s.size()) throw ConfigError("cut index out of range");
    if (in1[j]) throw ConfigError("cut sets overlap at index " + std::to_string(j));
  }
  double total = 0.0;
  for (Index i : v1)
    for (Index j : v2) total += s(i, j);
  return total;
}

double ncut_objective(const Eigen::MatrixXd& w, std::span<const IndexSet> parts) {
  const auto n = static_cast<Index>(w.rows());
  std::vector<int> hits(n, 0);
  for (const auto& part : parts)
    for (Index i : part) {
      if (i >= n) throw ConfigError("partition index out of range");
      if (hits[i]++) throw ConfigError("partition parts overlap at index " + std::to_string(i));
    }
  if (std::find(hits.begin(), hits.end(), 0) != hits.end()) throw ConfigError("partition does not cover every point");

  const VectorXd degree = w.rowwise().sum();
  double total = 0.0;
  for (const auto& part : parts) {
    double vol = 0.0;
    double assoc = 0.0;
    for (Index i : part) {
      vol += degree(ei(i));
      for (Index j : part) assoc += w(ei(i), ei(j));
    }
    if (!(vol > 0.0)) throw ConfigError("partition part has zero volume");
    total += (vol - assoc) / vol;
  }
  return total;
}

double ncut_objective(const SimilarityMatrix& s, std::span<const IndexSet> parts) {
  return ncut_objective(s.matrix(), parts);
}

Bipartition fiedler_bipartition(const SimilarityMatrix& s, SelfLoops loops) {
  return fiedler_bipartition(make_affinity_graph(s, loops));
}

Bipartition fiedler_bipartition(const AffinityGraph& graph) {
  const auto n = static_cast<Index>(graph.weights.rows());
  if (n < 2) throw ConfigError("bipartition needs at least two points");

  IndexSet active;
  IndexSet isolated;
  for (Index i = 0; i < n; ++i) (graph.degree(ei(i)) > 0.0 ? active : isolated).push_back(i);

  Bipartition out;
  out.eigenvector = VectorXd::Zero(ei(n));
  out.normalized_eigenvector = VectorXd::Zero(ei(n));
  const auto m = static_cast<Index>(active.size());

  if (m < 2) {
    // No edges to cut: peel off the lowest index.
    out.disconnected = true;
    out.nonnegative = {0};
    for (Index i = 1; i < n; ++i) out.negative.push_back(i);
    out.eigenvector(0) = 1.0;
    out.normalized_eigenvector(0) = 1.0;
    return out;
  }

  const MatrixXd w = submatrix(graph.weights, active);
  VectorXd d(ei(m));
  for (Index a = 0; a < m; ++a) d(ei(a)) = graph.degree(ei(active[a]));
  const VectorXd d_isqrt = d.cwiseSqrt().cwiseInverse();

  VectorXd v(ei(m));
  VectorXd u(ei(m));
  const auto comps = components(w);
  if (comps.size() > 1) {
    out.disconnected = true;
    std::vector<char> first(m, 0);
    double vol_a = 0.0;
    for (Index a : comps.front()) {
      first[a] = 1;
      vol_a += d(ei(a));
    }
    const double vol_b = d.sum() - vol_a;
    for (Index a = 0; a < m; ++a) v(ei(a)) = first[a] ? 1.0 / vol_a : -1.0 / vol_b;
    out.eigenvalue = 0.0;
  } else {
    const MatrixXd lap = MatrixXd::Identity(ei(m), ei(m)) - d_isqrt.asDiagonal() * w * d_isqrt.asDiagonal();
    Eigen::SelfAdjointEigenSolver<MatrixXd> solver(lap);
    if (solver.info() != Eigen::Success) throw NumericalError("eigensolver failed in Fiedler bipartition");
    out.eigenvalue = solver.eigenvalues()(1);
    v = d_isqrt.asDiagonal() * solver.eigenvectors().col(1);
  }
  v.normalize();
  u = d.cwiseSqrt().asDiagonal() * v;
  u.normalize();
  orient(v, &u);

  const VectorXd dv = d.asDiagonal() * v;
  out.residual = (d.asDiagonal() * v - w * v - out.eigenvalue * dv).norm() / dv.norm();

  std::vector<char> side(m, 0);
  Index positives = 0;
  for (Index a = 0; a < m; ++a) positives += (side[a] = v(ei(a)) >= 0.0);
  if (positives == 0 || positives == m) {
    out.fallback = true;
    IndexSet order(m);
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index x, Index y) { return v(ei(x)) > v(ei(y)); });
    std::fill(side.begin(), side.end(), 0);
    for (Index r = 0; r < (m + 1) / 2; ++r) side[order[r]] = 1;
  }

  for (Index a = 0; a < m; ++a) {
    out.eigenvector(ei(active[a])) = v(ei(a));
    out.normalized_eigenvector(ei(active[a])) = u(ei(a));
    (side[a] ? out.nonnegative : out.negative).push_back(active[a]);
  }
  auto& larger = out.nonnegative.size() >= out.negative.size() ? out.nonnegative : out.negative;
  for (Index i : isolated) larger.push_back(i);
  std::sort(out.nonnegative.begin(), out.nonnegative.end());
  std::sort(out.negative.begin(), out.negative.end());
  return out;
}

ClusterAssignment ncut_recursive(const SimilarityMatrix& s, Index K, SplitSelection selection, SelfLoops loops) {
  const Index n = s.size();
  if (K < 1) throw ConfigError("K must be at least 1");
  if (K > n) throw ConfigError("K = " + std::to_string(K) + " exceeds the number of points (" + std::to_string(n) + ")");
  const AffinityGraph graph = make_affinity_graph(s, loops);

  struct Candidate {
    IndexSet left;
    IndexSet right;
    double value = 0.0;
  };
  auto propose = [&](const IndexSet& cluster) -> std::optional<Candidate> {
    if (cluster.size() < 2) return std::nullopt;
    const MatrixXd w = submatrix(graph.weights, cluster);
    const Bipartition split = fiedler_bipartition(graph_from_weights(w));
    Candidate c;
    for (Index a : split.nonnegative) c.left.push_back(cluster[a]);
    for (Index a : split.negative) c.right.push_back(cluster[a]);
    const std::vector<IndexSet> local{split.nonnegative, split.negative};
    c.value = guarded_ncut(w, local);
    return c;
  };

  IndexSet all(n);
  std::iota(all.begin(), all.end(), Index{0});
  std::vector<IndexSet> clusters{all};
  std::vector<std::optional<Candidate>> candidates{propose(all)};

  while (clusters.size() < K) {
    std::optional<std::size_t> pick;
    for (std::size_t c = 0; c < clusters.size(); ++c) {
      if (!candidates[c]) continue;
      if (!pick) {
        pick = c;
      } else if (selection == SplitSelection::BestNcut ? candidates[c]->value < candidates[*pick]->value
                                                       : clusters[c].size() > clusters[*pick].size()) {
        pick = c;
      }
    }
    if (!pick) throw NumericalError("no cluster can be split further");
    Candidate chosen = std::move(*candidates[*pick]);
    clusters[*pick] = std::move(chosen.left);
    clusters.push_back(std::move(chosen.right));
    candidates[*pick] = propose(clusters[*pick]);
    candidates.push_back(propose(clusters.back()));
  }

  std::vector<int> raw(n, 0);
  for (std::size_t c = 0; c < clusters.size(); ++c)
    for (Index i : clusters[c]) raw[i] = static_cast<int>(c);
  return ClusterAssignment::from_labels(raw);
}

ClusterAssignment njw_cluster(const SimilarityMatrix& s, Index K, const KMeansConfig& kmeans_cfg, SelfLoops loops) {
  const Index n = s.size();
  if (K < 2) throw ConfigError("NJW needs K >= 2");
  if (K > n) throw ConfigError("K exceeds the number of points");
  const AffinityGraph graph = make_affinity_graph(s, loops);

  IndexSet active;
  IndexSet isolated;
  for (Index i = 0; i < n; ++i) (graph.degree(ei(i)) > 0.0 ? active : isolated).push_back(i);
  const auto m = static_cast<Index>(active.size());
  if (m < K) throw ConfigError("fewer connected points than clusters");

  const MatrixXd w = submatrix(graph.weights, active);
  VectorXd d_isqrt(ei(m));
  for (Index a = 0; a < m; ++a) d_isqrt(ei(a)) = 1.0 / std::sqrt(graph.degree(ei(active[a])));
  const MatrixXd normalized = d_isqrt.asDiagonal() * w * d_isqrt.asDiagonal();
  Eigen::SelfAdjointEigenSolver<MatrixXd> solver(normalized);
  if (solver.info() != Eigen::Success) throw NumericalError("eigensolver failed in NJW embedding");

  RowMatrix embedding = solver.eigenvectors().rightCols(ei(K));
  for (Eigen::Index r = 0; r < embedding.rows(); ++r) {
    const double norm = embedding.row(r).norm();
    if (norm > 0.0) embedding.row(r) /= norm;
  }
  KMeansConfig cfg = kmeans_cfg;
  cfg.K = K;
  const KMeansResult km = kmeans(embedding, cfg);

  std::vector<int> raw(n, 0);
  std::vector<Index> sizes(K, 0);
  for (Index a = 0; a < m; ++a) {
    raw[active[a]] = km.labels[a];
    ++sizes[static_cast<std::size_t>(km.labels[a])];
  }
  const int largest = static_cast<int>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
  for (Index i : isolated) raw[i] = largest;
  return ClusterAssignment::from_labels(raw);
}

Eigen::VectorXd normalized_laplacian_spectrum(const SimilarityMatrix& s, SelfLoops loops) {
  const AffinityGraph graph = make_affinity_graph(s, loops);
  const VectorXd d_isqrt = graph.degree.unaryExpr([](double x) { return x > 0.0 ? 1.0 / std::sqrt(x) : 0.0; });
  const auto n = graph.weights.rows();
  const MatrixXd lap = MatrixXd::Identity(n, n) - d_isqrt.asDiagonal() * graph.weights * d_isqrt.asDiagonal();
  Eigen::SelfAdjointEigenSolver<MatrixXd> solver(lap, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalError("eigensolver failed on normalized Laplacian");
  return solver.eigenvalues();
}

double eigengap(const SimilarityMatrix& s, Index K, SelfLoops loops) {
  if (K < 1 || K + 1 > s.size()) throw ConfigError("eigengap needs 1 <= K < n");
  const VectorXd lambda = normalized_laplacian_spectrum(s, loops);
  return lambda(ei(K)) - lambda(ei(K - 1));
}

}  // namespace rpf
