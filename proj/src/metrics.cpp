#include "rpf/metrics.hpp"

#include <algorithm>
#include <limits>

namespace rpf {

namespace {

void check_pair(std::span<const int> reference, std::span<const int> predicted) {
  if (reference.empty()) throw ConfigError("label vectors must be nonempty");
  if (reference.size() != predicted.size()) throw ConfigError("label vectors differ in length");
  auto negative = [](int x) { return x < 0; };
  if (std::any_of(reference.begin(), reference.end(), negative) ||
      std::any_of(predicted.begin(), predicted.end(), negative))
    throw ConfigError("labels must be nonnegative");
}

std::uint64_t choose2(std::uint64_t m) { return m * (m - (m > 0 ? 1 : 0)) / 2; }

}  // namespace

Eigen::MatrixXi contingency(std::span<const int> reference, std::span<const int> predicted) {
  check_pair(reference, predicted);
  const int l = *std::max_element(reference.begin(), reference.end()) + 1;
  const int k = *std::max_element(predicted.begin(), predicted.end()) + 1;
  Eigen::MatrixXi table = Eigen::MatrixXi::Zero(l, k);
  for (std::size_t i = 0; i < reference.size(); ++i) ++table(reference[i], predicted[i]);
  return table;
}

std::vector<int> max_weight_assignment(const Eigen::MatrixXi& weights) {
  const int rows = static_cast<int>(weights.rows());
  const int cols = static_cast<int>(weights.cols());
  const int size = std::max(rows, cols);
  if (size == 0) return {};
  const long long top = weights.size() ? weights.maxCoeff() : 0;

  // Hungarian method (potentials, 1-based) minimizing top - weight on the padded square.
  auto cost = [&](int r, int c) -> long long {
    if (r >= rows || c >= cols) return top;
    return top - weights(r, c);
  };
  constexpr long long kInf = std::numeric_limits<long long>::max() / 4;
  std::vector<long long> u(size + 1, 0), v(size + 1, 0);
  std::vector<int> match(size + 1, 0), way(size + 1, 0);
  for (int r = 1; r <= size; ++r) {
    match[0] = r;
    int c0 = 0;
    std::vector<long long> minv(size + 1, kInf);
    std::vector<char> used(size + 1, 0);
    do {
      used[c0] = 1;
      const int r0 = match[c0];
      long long delta = kInf;
      int c1 = 0;
      for (int c = 1; c <= size; ++c) {
        if (used[c]) continue;
        const long long cur = cost(r0 - 1, c - 1) - u[r0] - v[c];
        if (cur < minv[c]) {
          minv[c] = cur;
          way[c] = c0;
        }
        if (minv[c] < delta) {
          delta = minv[c];
          c1 = c;
        }
      }
      for (int c = 0; c <= size; ++c) {
        if (used[c]) {
          u[match[c]] += delta;
          v[c] -= delta;
        } else {
          minv[c] -= delta;
        }
      }
      c0 = c1;
    } while (match[c0] != 0);
    do {
      const int c1 = way[c0];
      match[c0] = match[c1];
      c0 = c1;
    } while (c0 != 0);
  }

  std::vector<int> row_to_col(static_cast<std::size_t>(rows), -1);
  for (int c = 1; c <= size; ++c) {
    const int r = match[c] - 1;
    if (r < rows && c - 1 < cols) row_to_col[static_cast<std::size_t>(r)] = c - 1;
  }
  return row_to_col;
}

double clustering_accuracy(std::span<const int> reference, std::span<const int> predicted) {
  const Eigen::MatrixXi table = contingency(reference, predicted);
  const auto match = max_weight_assignment(table);
  long long agree = 0;
  for (std::size_t r = 0; r < match.size(); ++r)
    if (match[r] >= 0) agree += table(static_cast<Eigen::Index>(r), match[r]);
  return static_cast<double>(agree) / static_cast<double>(reference.size());
}

std::uint64_t agreeing_pairs(std::span<const int> reference, std::span<const int> predicted, PairAgreement agreement) {
  const Eigen::MatrixXi table = contingency(reference, predicted);
  std::uint64_t same_both = 0;
  for (Eigen::Index r = 0; r < table.rows(); ++r)
    for (Eigen::Index c = 0; c < table.cols(); ++c) same_both += choose2(static_cast<std::uint64_t>(table(r, c)));
  if (agreement == PairAgreement::SameOnly) return same_both;

  std::uint64_t same_ref = 0;
  std::uint64_t same_pred = 0;
  for (Eigen::Index r = 0; r < table.rows(); ++r) same_ref += choose2(static_cast<std::uint64_t>(table.row(r).sum()));
  for (Eigen::Index c = 0; c < table.cols(); ++c) same_pred += choose2(static_cast<std::uint64_t>(table.col(c).sum()));
  // different-different = total - same_ref - same_pred + same_both
  return choose2(reference.size()) + 2 * same_both - same_ref - same_pred;
}

double cocluster_accuracy(std::span<const int> reference, std::span<const int> predicted, PairAgreement agreement) {
  check_pair(reference, predicted);
  if (reference.size() < 2) throw ConfigError("co-cluster accuracy needs at least two points");
  return static_cast<double>(agreeing_pairs(reference, predicted, agreement)) /
         static_cast<double>(choose2(reference.size()));
}

MetricReport evaluate(std::span<const int> reference, std::span<const int> predicted, PairAgreement agreement) {
  MetricReport report;
  report.rho_c = clustering_accuracy(reference, predicted);
  report.rho_r = cocluster_accuracy(reference, predicted, agreement);
  report.n = reference.size();
  report.l = *std::max_element(reference.begin(), reference.end()) + 1;
  report.K = *std::max_element(predicted.begin(), predicted.end()) + 1;
  return report;
}

}  // namespace rpf
