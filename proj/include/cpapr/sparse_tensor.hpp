#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace cpapr {

using Index = std::uint32_t;

/// Sparse count tensor in coordinate (COO) form.
///
/// Coordinates are stored mode-major: indices(m)[j] is the mode-m coordinate
/// of nonzero j. All coordinates are 0-based; the 1-based FROSTT convention
/// only exists at the file boundary (read_tns / write_tns).
class SparseTensor {
 public:
  SparseTensor() = default;

  /// Takes ownership of mode-major coordinates. Throws ContractError if any
  /// invariant is violated (order >= 1, dims >= 1, coordinates in range,
  /// values >= 0, consistent lengths).
  SparseTensor(std::vector<std::size_t> dims,
               std::vector<std::vector<Index>> indices,
               std::vector<double> values);

  std::size_t order() const { return dims_.size(); }
  std::size_t nnz() const { return values_.size(); }
  std::size_t dim(std::size_t mode) const { return dims_[mode]; }
  const std::vector<std::size_t>& dims() const { return dims_; }

  std::span<const Index> indices(std::size_t mode) const { return indices_[mode]; }
  Index coord(std::size_t j, std::size_t mode) const { return indices_[mode][j]; }
  std::span<const double> values() const { return values_; }
  double value(std::size_t j) const { return values_[j]; }

  friend bool operator==(const SparseTensor&, const SparseTensor&) = default;

 private:
  std::vector<std::size_t> dims_;
  std::vector<std::vector<Index>> indices_;
  std::vector<double> values_;
};

/// Stable per-mode ordering of nonzeros.
struct Permutation {
  std::size_t mode = 0;
  std::vector<std::size_t> order;
};

/// Half-open range [start, end) of permutation positions sharing one row.
struct RowSegment {
  std::size_t row;
  std::size_t start;
  std::size_t end;

  friend bool operator==(const RowSegment&, const RowSegment&) = default;
};

/// Parses FROSTT-style text. Lines starting with '#' are comments. Each data
/// line holds N 1-based integer coordinates and one nonnegative value. An
/// optional first non-comment line with exactly N integers declares dims.
/// Throws InputError on malformed input.
SparseTensor parse_tns(std::istream& in);
SparseTensor parse_tns(const std::string& text);
SparseTensor read_tns(const std::string& path);

/// Writes the dims header followed by 1-based data rows, values in %.17g.
void write_tns(std::ostream& out, const SparseTensor& tensor);
void write_tns(const std::string& path, const SparseTensor& tensor);

Permutation build_permutation(const SparseTensor& tensor, std::size_t mode);
std::vector<Permutation> build_permutations(const SparseTensor& tensor);

std::vector<RowSegment> row_segments(const Permutation& perm,
                                     const SparseTensor& tensor);

}  // namespace cpapr
