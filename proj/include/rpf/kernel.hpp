#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <unordered_map>
#include <vector>

#include "rpf/common.hpp"
#include "rpf/rpforest.hpp"

namespace rpf {

/// Dense symmetric similarity matrix. Construction rejects non-square input
/// and asymmetry beyond 1e-12.
class SimilarityMatrix {
 public:
  SimilarityMatrix() = default;
  explicit SimilarityMatrix(Eigen::MatrixXd values);

  Index size() const noexcept { return static_cast<Index>(values_.rows()); }
  double operator()(Index i, Index j) const {
    return values_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  const Eigen::MatrixXd& matrix() const noexcept { return values_; }
  /// Count of nonzero entries, diagonal included.
  Index nonzeros() const;

 private:
  Eigen::MatrixXd values_;
};

struct SparseEntry {
  Index row;  ///< row <= col
  Index col;
  double value;
};

/// Upper triangle (diagonal included) of a symmetric matrix, row-major order.
struct SparseSimilarity {
  Index n = 0;
  std::vector<SparseEntry> entries;
};

/// Integer co-occurrence counts over a set of trees, keyed by (min(i,j), max(i,j)).
/// Dense triangular storage up to kDenseKernelLimit points, a hash map above.
/// Merging is exact, so any reduction order yields the same counts.
class CooccurrenceCounts {
 public:
  static constexpr Index kDenseKernelLimit = 2000;

  explicit CooccurrenceCounts(Index n);

  void add_partition(std::span<const IndexSet> leaves);
  void merge(const CooccurrenceCounts& other);

  Index size() const noexcept { return n_; }
  Index partitions() const noexcept { return partitions_; }
  std::uint32_t count(Index i, Index j) const;
  bool dense() const noexcept { return !dense_.empty() || n_ == 0; }

  /// Counts divided by the number of partitions; the diagonal is exactly 1.
  SimilarityMatrix to_similarity() const;
  SparseSimilarity to_sparse() const;

 private:
  std::size_t tri(Index i, Index j) const noexcept { return i * n_ - i * (i + 1) / 2 + j; }

  Index n_;
  Index partitions_ = 0;
  std::vector<std::uint32_t> dense_;
  std::unordered_map<std::uint64_t, std::uint32_t> sparse_;
};

/// S_ij = 1 when i and j share a leaf of `leaves`, else 0.
SimilarityMatrix tree_cooccurrence(std::span<const IndexSet> leaves, Index n);

/// Fraction of forest trees in which each pair shares a leaf.
SimilarityMatrix rpf_kernel(const RpForest& forest);
SparseSimilarity rpf_kernel_sparse(const RpForest& forest);

struct PsdReport {
  double lambda_min = 0.0;
  bool passed = false;
};

/// Smallest eigenvalue; passes iff lambda_min >= -tol. Throws ConfigError when
/// the input is not square or is asymmetric beyond 1e-12.
PsdReport validate_psd(const Eigen::MatrixXd& s, double tol = 1e-8);
PsdReport validate_psd(const SimilarityMatrix& s, double tol = 1e-8);

/// l x l matrix of mean similarity between reference classes (diagonal
/// entries of S excluded from the within-class means).
Eigen::MatrixXd block_means(const SimilarityMatrix& s, std::span<const int> labels);

/// Dense CSV, 17 significant digits.
void write_kernel_csv(std::ostream& out, const SimilarityMatrix& s);
/// "i j value" lines for nonzero entries with i <= j, 0-based, 17 significant digits.
void write_kernel_coo(std::ostream& out, const SimilarityMatrix& s);
void write_kernel_coo(std::ostream& out, const SparseSimilarity& s);

}  // namespace rpf
