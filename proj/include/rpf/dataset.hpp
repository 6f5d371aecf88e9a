#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rpf/common.hpp"

namespace rpf {

/// n x p matrix of finite reals with optional reference labels.
///
/// Labels are contiguous ids 0..l-1. When loaded from CSV they are assigned in
/// order of first appearance, so the class named on the first data row is 0.
class DataMatrix {
 public:
  DataMatrix() = default;
  explicit DataMatrix(RowMatrix values, std::optional<std::vector<int>> labels = std::nullopt,
                      std::vector<std::string> feature_names = {}, std::vector<std::string> class_names = {});

  Index rows() const noexcept { return static_cast<Index>(values_.rows()); }
  Index cols() const noexcept { return static_cast<Index>(values_.cols()); }
  const RowMatrix& values() const noexcept { return values_; }
  auto row(Index i) const { return values_.row(static_cast<Eigen::Index>(i)); }

  bool has_labels() const noexcept { return labels_.has_value(); }
  /// Throws ConfigError when the matrix carries no labels.
  const std::vector<int>& labels() const;
  int num_classes() const noexcept { return num_classes_; }

  const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }
  const std::vector<std::string>& class_names() const noexcept { return class_names_; }

  /// Rows selected by `indices`, in that order, labels carried along.
  DataMatrix subset(std::span<const Index> indices) const;

 private:
  RowMatrix values_;
  std::optional<std::vector<int>> labels_;
  int num_classes_ = 0;
  std::vector<std::string> feature_names_;
  std::vector<std::string> class_names_;
};

/// Label column chosen by 0-based position or by header name.
using ColumnSelector = std::variant<Index, std::string>;

struct CsvOptions {
  bool has_header = true;
  std::optional<ColumnSelector> label_column;
  char delimiter = ',';
};

/// Splits RFC-4180 text into records of raw fields. Quoted fields may contain
/// delimiters, doubled quotes and line breaks.
std::vector<std::vector<std::string>> parse_csv_records(std::string_view text, char delimiter = ',');

DataMatrix parse_csv(std::string_view text, const CsvOptions& options = {});
DataMatrix load_csv(const std::filesystem::path& path, const CsvOptions& options = {});

/// Writes values with 17 significant digits (plus the label column, by class
/// name, when labels are present) so that parse_csv restores them bit for bit.
void write_csv(std::ostream& out, const DataMatrix& data, bool header = true);

/// Centers each listed column and scales it to unit sample (n-1) standard
/// deviation. Other columns are untouched. Throws ConfigError on an out of
/// range index or a constant column.
DataMatrix standardize(const DataMatrix& data, std::span<const Index> columns);

/// Uniform random subset of `size` rows, returned in ascending row order.
DataMatrix subsample(const DataMatrix& data, Index size, std::uint64_t seed, IndexSet* chosen = nullptr);

}  // namespace rpf
