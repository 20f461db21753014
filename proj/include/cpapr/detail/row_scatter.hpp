#pragma once

// Parallel scatter of per-nonzero row contributions into a dense output,
// shared by the Phi and MTTKRP kernels. Two accumulation strategies:
//   scatter_atomic  - every nonzero adds straight into its output row.
//   scatter_chunked - nonzeros visited in permutation order; a chunk keeps a
//                     running row sum and flushes it on row change, atomically
//                     only for rows it shares with a neighbouring chunk.

#include <atomic>
#include <cstddef>
#include <span>
#include <vector>

#include <omp.h>

#include "cpapr/dense_matrix.hpp"
#include "cpapr/policy.hpp"
#include "cpapr/sparse_tensor.hpp"

namespace cpapr {

/// Instrumentation collected when a kernel runs in counting mode.
struct KernelStats {
  std::size_t nonzeros = 0;
  std::size_t flops = 0;
  std::size_t atomic_flushes = 0;  // row flushes through serialized adds
  std::size_t plain_flushes = 0;   // row flushes without serialization

  KernelStats& operator+=(const KernelStats& o) {
    nonzeros += o.nonzeros;
    flops += o.flops;
    atomic_flushes += o.atomic_flushes;
    plain_flushes += o.plain_flushes;
    return *this;
  }
  friend bool operator==(const KernelStats&, const KernelStats&) = default;
};

namespace detail {

struct ScatterFlags {
  bool atomics = true;     // false: serialized adds become load/add/store
  bool fixed_row = false;  // every matrix row index replaced by a per-worker row
  bool count = false;      // fill KernelStats
};

inline void atomic_add(double& target, double v) {
  std::atomic_ref<double>(target).fetch_add(v, std::memory_order_relaxed);
}

// Unserialized read-modify-write. Concurrent callers may lose updates, but each
// access is a relaxed atomic load or store, so the race stays well-defined.
inline void racy_add(double& target, double v) {
  std::atomic_ref<double> ref(target);
  ref.store(ref.load(std::memory_order_relaxed) + v, std::memory_order_relaxed);
}

template <ScatterFlags F>
inline void shared_add(double& target, double v) {
  if constexpr (F.atomics)
    atomic_add(target, v);
  else
    racy_add(target, v);
}

// A row owned by one chunk. Under fixed_row several workers may alias one
// row, so keep the access race-tolerant there.
template <ScatterFlags F>
inline void owned_add(double& target, double v) {
  if constexpr (F.fixed_row)
    racy_add(target, v);
  else
    target += v;
}

template <ScatterFlags F>
inline std::size_t mapped_row(std::size_t row, std::size_t worker, std::size_t extent) {
  if constexpr (F.fixed_row)
    return worker % extent;
  else
    return row;
}

// Runs body(logical_thread) for every logical thread of the schedule, even if
// the OpenMP runtime hands out fewer OS threads than requested.
template <class Body>
inline void run_threads(const KernelSchedule& schedule, KernelStats& total, Body&& body) {
  const int requested = static_cast<int>(schedule.threads());
#pragma omp parallel num_threads(requested)
  {
    KernelStats local;
    const std::size_t actual = static_cast<std::size_t>(omp_get_num_threads());
    for (std::size_t t = static_cast<std::size_t>(omp_get_thread_num()); t < schedule.threads();
         t += actual)
      body(t, local);
#pragma omp critical(cpapr_scatter_stats)
    total += local;
  }
}

/// Contribution contract:
///   contrib(j, row, worker, sink, stats) calls sink(r, value) for r in [0, R)
///   where `row` is nonzero j's output coordinate.
template <ScatterFlags F, class Contribution>
KernelStats scatter_atomic(const KernelSchedule& schedule, std::span<const Index> rows,
                           DenseMatrix& out, const Contribution& contrib) {
  const std::size_t R = out.cols();
  const std::size_t out_rows = out.rows();
  KernelStats total;
  run_threads(schedule, total, [&](std::size_t t, KernelStats& local) {
    schedule.for_each_chunk_of_thread(t, [&](const Chunk& c) {
      for (std::size_t j = c.begin; j < c.end; ++j) {
        const std::size_t i = rows[j];
        double* o = out.data() + mapped_row<F>(i, t, out_rows) * R;
        contrib(j, i, t, [o, &local](std::size_t r, double v) {
          shared_add<F>(o[r], v);
          if constexpr (F.count) ++local.flops;
        }, local);
        if constexpr (F.count) {
          ++local.nonzeros;
          ++local.atomic_flushes;
        }
      }
    });
  });
  return total;
}

template <ScatterFlags F, class Contribution>
KernelStats scatter_chunked(const KernelSchedule& schedule, std::span<const std::size_t> perm,
                            std::span<const Index> rows, DenseMatrix& out,
                            const Contribution& contrib) {
  const std::size_t R = out.cols();
  const std::size_t out_rows = out.rows();
  const std::size_t nnz = perm.size();
  KernelStats total;
  run_threads(schedule, total, [&](std::size_t t, KernelStats& local) {
    std::vector<double> tmp(R, 0.0);
    schedule.for_each_chunk_of_thread(t, [&](const Chunk& c) {
      if (c.begin >= c.end) return;
      const std::size_t first_row = rows[perm[c.begin]];
      const std::size_t last_row = rows[perm[c.end - 1]];
      // Rows continuing from the previous chunk or into the next one are
      // shared; every other row in the chunk is owned outright.
      const bool first_shared = c.begin > 0 && rows[perm[c.begin - 1]] == first_row;
      const bool last_shared = c.end < nnz && rows[perm[c.end]] == last_row;

      auto flush = [&](std::size_t row) {
        double* o = out.data() + mapped_row<F>(row, t, out_rows) * R;
        const bool shared = (first_shared && row == first_row) || (last_shared && row == last_row);
        if (shared) {
          for (std::size_t r = 0; r < R; ++r) shared_add<F>(o[r], tmp[r]);
        } else {
          for (std::size_t r = 0; r < R; ++r) owned_add<F>(o[r], tmp[r]);
        }
        if constexpr (F.count) {
          local.flops += R;
          ++(shared ? local.atomic_flushes : local.plain_flushes);
        }
        std::fill(tmp.begin(), tmp.end(), 0.0);
      };

      std::size_t current = first_row;
      for (std::size_t z = c.begin; z < c.end; ++z) {
        const std::size_t j = perm[z];
        const std::size_t i = rows[j];
        if (i != current) {
          flush(current);
          current = i;
        }
        contrib(j, i, t, [&tmp, &local](std::size_t r, double v) {
          tmp[r] += v;
          if constexpr (F.count) ++local.flops;
        }, local);
        if constexpr (F.count) ++local.nonzeros;
      }
      flush(current);
    });
  });
  return total;
}

}  // namespace detail
}  // namespace cpapr
