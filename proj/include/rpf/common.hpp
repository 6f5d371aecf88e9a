#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace rpf {

using Index = std::size_t;
using IndexSet = std::vector<Index>;

/// Row-major so that each data point is a contiguous row.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Rng = std::mt19937_64;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration or arguments; the CLI maps this to exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t row, std::size_t column)
      : Error(what + " (row " + std::to_string(row) + ", column " + std::to_string(column) + ")"),
        row_(row),
        column_(column) {}

  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

/// A numerical routine failed (eigensolver did not converge, degenerate input).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent random stream keyed by (seed, stream). Streams for distinct keys
/// do not depend on the order in which they are created.
inline Rng substream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(mix64(seed) >> 32), static_cast<std::uint32_t>(mix64(seed)),
                    static_cast<std::uint32_t>(mix64(stream ^ 0xa5a5a5a5a5a5a5a5ULL) >> 32),
                    static_cast<std::uint32_t>(mix64(stream ^ 0xa5a5a5a5a5a5a5a5ULL))};
  return Rng(seq);
}

}  // namespace rpf
