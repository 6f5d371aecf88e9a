#include "rpf/kernel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>
#include <tuple>

#include <Eigen/Eigenvalues>

#include "rpf/parallel.hpp"

namespace rpf {

namespace {

constexpr double kSymmetryTolerance = 1e-12;

void require_symmetric(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw ConfigError("similarity matrix must be square");
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = i + 1; j < m.cols(); ++j)
      if (!(std::abs(m(i, j) - m(j, i)) <= kSymmetryTolerance))
        throw ConfigError("similarity matrix is not symmetric at (" + std::to_string(i) + ", " + std::to_string(j) +
                          ")");
}

void put_real(std::ostream& out, double value) {
  char buffer[32];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value, std::chars_format::general, 17);
  out.write(buffer, ptr - buffer);
}

std::uint64_t pair_key(Index i, Index j) { return (static_cast<std::uint64_t>(i) << 32) | static_cast<std::uint64_t>(j); }

}  // namespace

SimilarityMatrix::SimilarityMatrix(Eigen::MatrixXd values) : values_(std::move(values)) { require_symmetric(values_); }

Index SimilarityMatrix::nonzeros() const { return static_cast<Index>((values_.array() != 0.0).count()); }

CooccurrenceCounts::CooccurrenceCounts(Index n) : n_(n) {
  if (n_ <= kDenseKernelLimit) dense_.assign(n_ * (n_ + 1) / 2, 0);
}

void CooccurrenceCounts::add_partition(std::span<const IndexSet> leaves) {
  for (const auto& leaf : leaves) {
    IndexSet sorted = leaf;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t a = 0; a < sorted.size(); ++a) {
      for (std::size_t b = a; b < sorted.size(); ++b) {
        if (dense()) {
          ++dense_[tri(sorted[a], sorted[b])];
        } else {
          ++sparse_[pair_key(sorted[a], sorted[b])];
        }
      }
    }
  }
  ++partitions_;
}

void CooccurrenceCounts::merge(const CooccurrenceCounts& other) {
  if (other.n_ != n_) throw ConfigError("cannot merge co-occurrence counts of different sizes");
  if (dense()) {
    for (std::size_t k = 0; k < dense_.size(); ++k) dense_[k] += other.dense_[k];
  } else {
    for (const auto& [key, c] : other.sparse_) sparse_[key] += c;
  }
  partitions_ += other.partitions_;
}

std::uint32_t CooccurrenceCounts::count(Index i, Index j) const {
  if (i > j) std::swap(i, j);
  if (dense()) return dense_[tri(i, j)];
  const auto it = sparse_.find(pair_key(i, j));
  return it == sparse_.end() ? 0 : it->second;
}

SimilarityMatrix CooccurrenceCounts::to_similarity() const {
  const auto n = static_cast<Eigen::Index>(n_);
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
  const double total = static_cast<double>(partitions_);
  if (dense()) {
    for (Index i = 0; i < n_; ++i)
      for (Index j = i + 1; j < n_; ++j)
        s(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            s(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = dense_[tri(i, j)] / total;
  } else {
    for (const auto& [key, c] : sparse_) {
      const auto i = static_cast<Eigen::Index>(key >> 32);
      const auto j = static_cast<Eigen::Index>(key & 0xffffffffULL);
      s(i, j) = s(j, i) = c / total;
    }
  }
  s.diagonal().setOnes();
  return SimilarityMatrix(std::move(s));
}

SparseSimilarity CooccurrenceCounts::to_sparse() const {
  SparseSimilarity out;
  out.n = n_;
  const double total = static_cast<double>(partitions_);
  if (dense()) {
    for (Index i = 0; i < n_; ++i) {
      out.entries.push_back({i, i, 1.0});
      for (Index j = i + 1; j < n_; ++j)
        if (const auto c = dense_[tri(i, j)]) out.entries.push_back({i, j, c / total});
    }
    return out;
  }
  for (const auto& [key, c] : sparse_) {
    const Index i = static_cast<Index>(key >> 32);
    const Index j = static_cast<Index>(key & 0xffffffffULL);
    out.entries.push_back({i, j, i == j ? 1.0 : c / total});
  }
  std::sort(out.entries.begin(), out.entries.end(),
            [](const SparseEntry& a, const SparseEntry& b) { return std::tie(a.row, a.col) < std::tie(b.row, b.col); });
  return out;
}

SimilarityMatrix tree_cooccurrence(std::span<const IndexSet> leaves, Index n) {
  const auto size = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(size, size);
  for (const auto& leaf : leaves)
    for (Index i : leaf) {
      if (i >= n) throw ConfigError("partition index out of range");
      for (Index j : leaf) s(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 1.0;
    }
  return SimilarityMatrix(std::move(s));
}

namespace {

CooccurrenceCounts count_forest(const RpForest& forest) {
  if (forest.trees.empty()) throw ConfigError("forest has no trees");
  if (forest.n >= (Index{1} << 32)) throw ConfigError("kernel supports at most 2^32 points");
  const unsigned workers = static_cast<unsigned>(std::min<Index>(default_thread_count(), forest.trees.size()));
  std::vector<CooccurrenceCounts> partial(workers, CooccurrenceCounts(forest.n));
  // Tree t goes to worker t % workers; integer counts make the merge order irrelevant.
  parallel_for(
      workers,
      [&](Index w) {
        for (Index t = w; t < forest.trees.size(); t += workers) partial[w].add_partition(forest.trees[t].leaf_partition());
      },
      workers);
  for (unsigned w = 1; w < workers; ++w) partial[0].merge(partial[w]);
  return std::move(partial[0]);
}

}  // namespace

SimilarityMatrix rpf_kernel(const RpForest& forest) { return count_forest(forest).to_similarity(); }

SparseSimilarity rpf_kernel_sparse(const RpForest& forest) { return count_forest(forest).to_sparse(); }

PsdReport validate_psd(const Eigen::MatrixXd& s, double tol) {
  require_symmetric(s);
  if (s.rows() == 0) return {0.0, true};
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalError("eigensolver failed in PSD check");
  const double lambda_min = solver.eigenvalues()(0);
  return {lambda_min, lambda_min >= -tol};
}

PsdReport validate_psd(const SimilarityMatrix& s, double tol) { return validate_psd(s.matrix(), tol); }

Eigen::MatrixXd block_means(const SimilarityMatrix& s, std::span<const int> labels) {
  if (labels.size() != s.size()) throw ConfigError("label count does not match kernel size");
  const int l = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(l, l);
  Eigen::MatrixXd count = Eigen::MatrixXd::Zero(l, l);
  for (Index i = 0; i < s.size(); ++i)
    for (Index j = i + 1; j < s.size(); ++j) {
      const int a = std::min(labels[i], labels[j]);
      const int b = std::max(labels[i], labels[j]);
      sum(a, b) += s(i, j);
      count(a, b) += 1.0;
    }
  // mirror so the result is exactly symmetric
  sum.triangularView<Eigen::StrictlyLower>() = sum.transpose();
  count.triangularView<Eigen::StrictlyLower>() = count.transpose();
  return (count.array() > 0).select(sum.array() / count.array().max(1.0), 0.0).matrix();
}

void write_kernel_csv(std::ostream& out, const SimilarityMatrix& s) {
  for (Index i = 0; i < s.size(); ++i) {
    for (Index j = 0; j < s.size(); ++j) {
      if (j) out << ',';
      put_real(out, s(i, j));
    }
    out << '\n';
  }
}

void write_kernel_coo(std::ostream& out, const SimilarityMatrix& s) {
  for (Index i = 0; i < s.size(); ++i)
    for (Index j = i; j < s.size(); ++j)
      if (s(i, j) != 0.0) {
        out << i << ' ' << j << ' ';
        put_real(out, s(i, j));
        out << '\n';
      }
}

void write_kernel_coo(std::ostream& out, const SparseSimilarity& s) {
  for (const auto& e : s.entries) {
    out << e.row << ' ' << e.col << ' ';
    put_real(out, e.value);
    out << '\n';
  }
}

}  // namespace rpf
