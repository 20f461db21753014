#include "cpapr/sparse_tensor.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>

#include "cpapr/error.hpp"

namespace cpapr {

SparseTensor::SparseTensor(std::vector<std::size_t> dims,
                           std::vector<std::vector<Index>> indices,
                           std::vector<double> values)
    : dims_(std::move(dims)), indices_(std::move(indices)), values_(std::move(values)) {
  if (dims_.empty()) throw ContractError("tensor order must be at least 1");
  if (indices_.size() != dims_.size())
    throw ContractError("coordinate arrays do not match tensor order");
  for (std::size_t m = 0; m < dims_.size(); ++m) {
    if (dims_[m] == 0) throw ContractError("tensor dims must be positive");
    if (indices_[m].size() != values_.size())
      throw ContractError("coordinate and value arrays differ in length");
    for (Index i : indices_[m]) {
      if (i >= dims_[m]) throw ContractError("coordinate out of range in mode " + std::to_string(m));
    }
  }
  for (double v : values_) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ContractError("tensor values must be finite and nonnegative");
  }
}

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
    std::size_t start = pos;
    while (pos < line.size() && !std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
    if (pos > start) tokens.push_back(line.substr(start, pos - start));
  }
  return tokens;
}

std::optional<std::uint64_t> parse_uint(std::string_view tok) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) return std::nullopt;
  return v;
}

std::optional<double> parse_real(std::string_view tok) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) return std::nullopt;
  return v;
}

bool all_integers(const std::vector<std::string_view>& tokens) {
  return std::all_of(tokens.begin(), tokens.end(),
                     [](std::string_view t) { return parse_uint(t).has_value(); });
}

[[noreturn]] void fail(std::size_t line_no, const std::string& what) {
  throw InputError("line " + std::to_string(line_no) + ": " + what);
}

struct TnsBuilder {
  std::size_t order = 0;
  std::vector<std::vector<Index>> indices;
  std::vector<double> values;
  std::vector<std::size_t> max_coord;

  void start(std::size_t n) {
    order = n;
    indices.assign(n, {});
    max_coord.assign(n, 0);
  }

  void add(const std::vector<std::string_view>& tokens, std::size_t line_no) {
    if (tokens.size() != order + 1)
      fail(line_no, "expected " + std::to_string(order + 1) + " columns, found " +
                        std::to_string(tokens.size()));
    for (std::size_t m = 0; m < order; ++m) {
      auto c = parse_uint(tokens[m]);
      if (!c) fail(line_no, "non-numeric coordinate '" + std::string(tokens[m]) + "'");
      if (*c == 0) fail(line_no, "coordinates are 1-based; found 0");
      if (*c > std::numeric_limits<Index>::max()) fail(line_no, "coordinate too large");
      indices[m].push_back(static_cast<Index>(*c - 1));
      max_coord[m] = std::max<std::size_t>(max_coord[m], *c);
    }
    auto v = parse_real(tokens[order]);
    if (!v || !std::isfinite(*v)) fail(line_no, "non-numeric value '" + std::string(tokens[order]) + "'");
    if (*v < 0.0) fail(line_no, "negative count value");
    values.push_back(*v);
  }
};

}  // namespace

SparseTensor parse_tns(std::istream& in) {
  TnsBuilder builder;
  std::optional<std::vector<std::size_t>> header;
  std::vector<std::string_view> pending;
  std::string pending_line;
  std::size_t pending_no = 0;
  bool have_pending = false;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto tokens = split_ws(line);
    if (tokens.empty() || tokens.front().front() == '#') continue;

    if (builder.order == 0 && !have_pending) {
      pending_line = line;
      pending = split_ws(pending_line);
      pending_no = line_no;
      have_pending = true;
      continue;
    }
    if (have_pending) {
      have_pending = false;
      if (pending.size() + 1 == tokens.size() && all_integers(pending)) {
        header.emplace();
        for (auto t : pending) header->push_back(*parse_uint(t));
        builder.start(pending.size());
      } else {
        if (pending.size() < 2) fail(pending_no, "data lines need at least one coordinate and a value");
        builder.start(pending.size() - 1);
        builder.add(pending, pending_no);
      }
    }
    builder.add(tokens, line_no);
  }
  if (have_pending) {
    if (pending.size() < 2) fail(pending_no, "data lines need at least one coordinate and a value");
    builder.start(pending.size() - 1);
    builder.add(pending, pending_no);
  }
  if (builder.values.empty()) throw InputError("empty tensor input: no nonzeros found");

  std::vector<std::size_t> dims = builder.max_coord;
  if (header) {
    for (std::size_t m = 0; m < dims.size(); ++m) {
      if ((*header)[m] < dims[m])
        throw InputError("header declares dim " + std::to_string((*header)[m]) + " for mode " +
                         std::to_string(m) + " but data reaches " + std::to_string(dims[m]));
    }
    dims = *header;
  }
  return SparseTensor(std::move(dims), std::move(builder.indices), std::move(builder.values));
}

SparseTensor parse_tns(const std::string& text) {
  std::istringstream in(text);
  return parse_tns(in);
}

SparseTensor read_tns(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open tensor file '" + path + "'");
  return parse_tns(in);
}

void write_tns(std::ostream& out, const SparseTensor& tensor) {
  char buf[64];
  out << "# " << tensor.order() << "-way tensor, " << tensor.nnz() << " nonzeros\n";
  for (std::size_t m = 0; m < tensor.order(); ++m) out << (m ? " " : "") << tensor.dim(m);
  out << '\n';
  for (std::size_t j = 0; j < tensor.nnz(); ++j) {
    for (std::size_t m = 0; m < tensor.order(); ++m) out << tensor.coord(j, m) + 1 << ' ';
    std::snprintf(buf, sizeof(buf), "%.17g", tensor.value(j));
    out << buf << '\n';
  }
}

void write_tns(const std::string& path, const SparseTensor& tensor) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write tensor file '" + path + "'");
  write_tns(out, tensor);
}

Permutation build_permutation(const SparseTensor& tensor, std::size_t mode) {
  if (mode >= tensor.order())
    throw ContractError("mode " + std::to_string(mode) + " out of range for order " +
                        std::to_string(tensor.order()));
  Permutation perm{mode, std::vector<std::size_t>(tensor.nnz())};
  std::iota(perm.order.begin(), perm.order.end(), std::size_t{0});
  auto rows = tensor.indices(mode);
  std::stable_sort(perm.order.begin(), perm.order.end(),
                   [rows](std::size_t a, std::size_t b) { return rows[a] < rows[b]; });
  return perm;
}

std::vector<Permutation> build_permutations(const SparseTensor& tensor) {
  std::vector<Permutation> perms;
  perms.reserve(tensor.order());
  for (std::size_t m = 0; m < tensor.order(); ++m) perms.push_back(build_permutation(tensor, m));
  return perms;
}

std::vector<RowSegment> row_segments(const Permutation& perm, const SparseTensor& tensor) {
  std::vector<RowSegment> segments;
  auto rows = tensor.indices(perm.mode);
  const std::size_t n = perm.order.size();
  std::size_t start = 0;
  while (start < n) {
    const Index row = rows[perm.order[start]];
    std::size_t end = start + 1;
    while (end < n && rows[perm.order[end]] == row) ++end;
    segments.push_back({row, start, end});
    start = end;
  }
  return segments;
}

}  // namespace cpapr
