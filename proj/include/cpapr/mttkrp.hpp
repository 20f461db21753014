#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "cpapr/dense_matrix.hpp"
#include "cpapr/phi_strategy.hpp"
#include "cpapr/policy.hpp"
#include "cpapr/sparse_tensor.hpp"
#include "cpapr/stream_bench.hpp"

namespace cpapr {

struct MttkrpRun {
  PhiStrategy strategy{PhiVariant::AtomicPerNonzero, std::nullopt};
  PolicyParams policy{1, 1, 128};
  std::size_t worker_budget = 0;
  const Permutation* perm = nullptr;  // ChunkedSorted; sorted on demand if null
};

/// X_(mode) times the Khatri-Rao product of every factor but `mode`: for each
/// nonzero, T = prod_{m != mode} A(m)[k_m, :], T *= v, out[i, :] += T.
DenseMatrix mttkrp(const SparseTensor& tensor, const std::vector<DenseMatrix>& factors,
                   std::size_t mode, const MttkrpRun& run = {});

/// Bytes one MTTKRP pass moves under our accounting:
/// nnz * (8 value + (N-1) R 8 factor reads + 16 R accumulate read+write).
double mttkrp_bytes(std::size_t nnz, std::size_t order, std::size_t rank);

struct MttkrpBenchOptions {
  std::size_t rank = 16;
  std::size_t reps = 5;  // first is warm-up
  std::uint64_t seed = 1;
  MttkrpRun run;
  std::string label = "tensor";
};

/// Times MTTKRP over every mode per repetition and reports effective
/// bandwidth from mttkrp_bytes. `validated` compares one result per mode with
/// a sequential atomic-strategy run.
BandwidthResult mttkrp_bandwidth(const SparseTensor& tensor, const MttkrpBenchOptions& options);

}  // namespace cpapr
