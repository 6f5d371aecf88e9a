#include "rpf/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace rpf {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

std::optional<double> parse_real(std::string_view cell) {
  cell = trim(cell);
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  if (cell.empty()) return std::nullopt;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(value)) return std::nullopt;
  return value;
}

void format_real(std::ostream& out, double value) {
  char buffer[32];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value, std::chars_format::general, 17);
  out.write(buffer, ptr - buffer);
}

void write_field(std::ostream& out, const std::string& field, char delimiter) {
  if (field.find_first_of(std::string{delimiter, '"', '\n', '\r'}) == std::string::npos) {
    out << field;
    return;
  }
  out << '"';
  for (char c : field) {
    if (c == '"') out << '"';
    out << c;
  }
  out << '"';
}

}  // namespace

DataMatrix::DataMatrix(RowMatrix values, std::optional<std::vector<int>> labels, std::vector<std::string> feature_names,
                       std::vector<std::string> class_names)
    : values_(std::move(values)),
      labels_(std::move(labels)),
      feature_names_(std::move(feature_names)),
      class_names_(std::move(class_names)) {
  if (values_.rows() < 1 || values_.cols() < 1) throw ConfigError("data matrix must have at least one row and column");
  if (!values_.allFinite()) throw ConfigError("data matrix contains a non-finite value");
  if (!feature_names_.empty() && feature_names_.size() != cols())
    throw ConfigError("feature name count does not match column count");
  if (labels_) {
    if (labels_->size() != rows()) throw ConfigError("label count does not match row count");
    const auto [lo, hi] = std::minmax_element(labels_->begin(), labels_->end());
    if (*lo != 0) throw ConfigError("labels must start at 0");
    std::vector<bool> seen(static_cast<std::size_t>(*hi) + 1, false);
    for (int l : *labels_) seen[static_cast<std::size_t>(l)] = true;
    if (std::find(seen.begin(), seen.end(), false) != seen.end())
      throw ConfigError("label ids must be contiguous 0..l-1");
    num_classes_ = *hi + 1;
    if (!class_names_.empty() && class_names_.size() != static_cast<std::size_t>(num_classes_))
      throw ConfigError("class name count does not match label count");
  } else if (!class_names_.empty()) {
    throw ConfigError("class names given without labels");
  }
}

const std::vector<int>& DataMatrix::labels() const {
  if (!labels_) throw ConfigError("data matrix has no reference labels");
  return *labels_;
}

DataMatrix DataMatrix::subset(std::span<const Index> indices) const {
  RowMatrix values(static_cast<Eigen::Index>(indices.size()), values_.cols());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] >= rows()) throw ConfigError("subset index out of range");
    values.row(static_cast<Eigen::Index>(k)) = values_.row(static_cast<Eigen::Index>(indices[k]));
  }
  if (!labels_) return DataMatrix(std::move(values), std::nullopt, feature_names_);

  // Re-encode so the subset's labels stay contiguous.
  std::map<int, int> remap;
  std::vector<int> labels;
  labels.reserve(indices.size());
  std::vector<std::string> names;
  for (Index i : indices) {
    const int old = (*labels_)[i];
    auto [it, inserted] = remap.try_emplace(old, static_cast<int>(remap.size()));
    if (inserted && !class_names_.empty()) names.push_back(class_names_[static_cast<std::size_t>(old)]);
    labels.push_back(it->second);
  }
  return DataMatrix(std::move(values), std::move(labels), feature_names_, std::move(names));
}

std::vector<std::vector<std::string>> parse_csv_records(std::string_view text, char delimiter) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t row = 1;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    // A line holding a single empty field is a blank line.
    if (!(record.size() == 1 && record.front().empty())) records.push_back(std::move(record));
    record.clear();
    ++row;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"' && !field_started) {
      in_quotes = true;
      field_started = true;
    } else if (c == delimiter) {
      end_field();
    } else if (c == '\r') {
      if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
      end_record();
    } else if (c == '\n') {
      end_record();
    } else {
      field.push_back(c);
      if (c != ' ' && c != '\t') field_started = true;
    }
  }
  if (in_quotes) throw ParseError("unterminated quoted field", row, record.size() + 1);
  if (field_started || !field.empty() || !record.empty()) end_record();
  return records;
}

DataMatrix parse_csv(std::string_view text, const CsvOptions& options) {
  auto records = parse_csv_records(text, options.delimiter);
  if (records.empty()) throw ParseError("empty CSV input", 1, 1);

  const std::size_t width = records.front().size();
  for (std::size_t r = 0; r < records.size(); ++r) {
    if (records[r].size() != width)
      throw ParseError("ragged row: expected " + std::to_string(width) + " fields, found " +
                           std::to_string(records[r].size()),
                       r + 1, std::min(width, records[r].size()) + 1);
  }

  std::vector<std::string> header;
  std::size_t first_data = 0;
  if (options.has_header) {
    header.reserve(width);
    for (const auto& h : records.front()) header.emplace_back(trim(h));
    first_data = 1;
  }
  if (records.size() == first_data) throw ParseError("CSV has a header but no data rows", 1, 1);

  std::optional<std::size_t> label_col;
  if (options.label_column) {
    if (const auto* index = std::get_if<Index>(&*options.label_column)) {
      if (*index >= width) throw ConfigError("label column " + std::to_string(*index) + " out of range");
      label_col = *index;
    } else {
      const auto& name = std::get<std::string>(*options.label_column);
      if (!options.has_header) throw ConfigError("label column by name requires a header row");
      const auto it = std::find(header.begin(), header.end(), name);
      if (it == header.end()) throw ConfigError("label column '" + name + "' not found in header");
      label_col = static_cast<std::size_t>(it - header.begin());
    }
  }
  const std::size_t p = width - (label_col ? 1 : 0);
  if (p == 0) throw ConfigError("CSV has no feature columns");

  const std::size_t n = records.size() - first_data;
  RowMatrix values(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  std::vector<int> labels;
  std::vector<std::string> class_names;
  std::unordered_map<std::string, int> codes;

  for (std::size_t r = 0; r < n; ++r) {
    const auto& rec = records[first_data + r];
    std::size_t out_col = 0;
    for (std::size_t c = 0; c < width; ++c) {
      if (label_col && c == *label_col) {
        std::string key(trim(rec[c]));
        auto [it, inserted] = codes.try_emplace(key, static_cast<int>(class_names.size()));
        if (inserted) class_names.push_back(key);
        labels.push_back(it->second);
        continue;
      }
      const auto value = parse_real(rec[c]);
      if (!value)
        throw ParseError("cannot parse '" + rec[c] + "' as a finite real", first_data + r + 1, c + 1);
      values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(out_col++)) = *value;
    }
  }

  std::vector<std::string> feature_names;
  if (options.has_header) {
    for (std::size_t c = 0; c < width; ++c)
      if (!label_col || c != *label_col) feature_names.push_back(header[c]);
  }
  if (label_col) return DataMatrix(std::move(values), std::move(labels), std::move(feature_names), std::move(class_names));
  return DataMatrix(std::move(values), std::nullopt, std::move(feature_names));
}

DataMatrix load_csv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("input not found: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_csv(buffer.str(), options);
}

void write_csv(std::ostream& out, const DataMatrix& data, bool header) {
  const Index p = data.cols();
  if (header) {
    for (Index c = 0; c < p; ++c) {
      if (c) out << ',';
      write_field(out, data.feature_names().empty() ? "x" + std::to_string(c) : data.feature_names()[c], ',');
    }
    if (data.has_labels()) out << ",label";
    out << '\n';
  }
  for (Index r = 0; r < data.rows(); ++r) {
    for (Index c = 0; c < p; ++c) {
      if (c) out << ',';
      format_real(out, data.values()(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)));
    }
    if (data.has_labels()) {
      out << ',';
      const int l = data.labels()[r];
      write_field(out, data.class_names().empty() ? std::to_string(l) : data.class_names()[static_cast<std::size_t>(l)],
                  ',');
    }
    out << '\n';
  }
}

DataMatrix standardize(const DataMatrix& data, std::span<const Index> columns) {
  if (columns.empty()) return data;
  if (data.rows() < 2) throw ConfigError("standardization needs at least two rows");
  RowMatrix values = data.values();
  const double n = static_cast<double>(data.rows());
  for (Index c : columns) {
    if (c >= data.cols()) throw ConfigError("standardize column " + std::to_string(c) + " out of range");
    auto col = values.col(static_cast<Eigen::Index>(c));
    const double mean = col.mean();
    col.array() -= mean;
    const double sd = std::sqrt(col.squaredNorm() / (n - 1.0));
    if (!(sd > 0.0)) throw ConfigError("cannot standardize constant column " + std::to_string(c));
    col /= sd;
  }
  std::optional<std::vector<int>> labels;
  if (data.has_labels()) labels = data.labels();
  return DataMatrix(std::move(values), std::move(labels), data.feature_names(), data.class_names());
}

DataMatrix subsample(const DataMatrix& data, Index size, std::uint64_t seed, IndexSet* chosen) {
  if (size == 0 || size > data.rows()) throw ConfigError("subsample size must be in [1, n]");
  IndexSet order(data.rows());
  std::iota(order.begin(), order.end(), Index{0});
  Rng rng = substream(seed, 0x5b5a3e);
  std::shuffle(order.begin(), order.end(), rng);
  order.resize(size);
  std::sort(order.begin(), order.end());
  if (chosen) *chosen = order;
  return data.subset(order);
}

}  // namespace rpf
