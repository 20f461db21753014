#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "cpapr/dense_matrix.hpp"
#include "cpapr/sparse_tensor.hpp"

namespace cpapr {

/// CP model [lambda; A(1) ... A(N)]. Factor n is dims[n] x rank, row-major.
struct KruskalModel {
  std::vector<double> weights;
  std::vector<DenseMatrix> factors;

  std::size_t rank() const { return weights.size(); }
  std::size_t order() const { return factors.size(); }

  /// Sum_r lambda_r prod_m A(m)[coords[m]][r] at one tensor coordinate.
  double value_at(const SparseTensor& tensor, std::size_t j) const;
};

/// Per-nonzero rows of the Khatri-Rao product of every factor except `mode`.
struct PiMatrix {
  std::size_t mode = 0;
  DenseMatrix entries;  // nnz x R
};

/// Factor entries uniform in (0, 1] from a seeded mt19937_64, weights = 1.
KruskalModel init_model(const std::vector<std::size_t>& dims, std::size_t rank,
                        std::uint64_t seed);

/// Throws ContractError unless the model's factor shapes match the tensor.
void check_compatible(const KruskalModel& model, const SparseTensor& tensor);

/// `threads` == 0 uses the OpenMP default.
PiMatrix compute_pi(const KruskalModel& model, const SparseTensor& tensor, std::size_t mode,
                    int threads = 0);

struct NormalizedFactor {
  std::vector<double> lambda;
  DenseMatrix factor;
  // Set when some column of B summed to zero; that column is left as zeros.
  bool zero_column = false;
};

/// lambda = e^T B, A = B diag(lambda)^-1.
NormalizedFactor normalize(const DenseMatrix& B);

/// Column-normalizes every factor in place, folding the scales into weights.
void normalize_all(KruskalModel& model);

/// Writes <prefix>.lambda (one line of R weights) and <prefix>.factor<n>.tns
/// (1-based "row column value" triples, dims header) for each mode.
void save_model(const std::string& prefix, const KruskalModel& model);
KruskalModel load_model(const std::string& prefix, std::size_t order);

}  // namespace cpapr
