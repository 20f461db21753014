#pragma once

#include <cstddef>

#include "cpapr/dense_matrix.hpp"
#include "cpapr/detail/row_scatter.hpp"
#include "cpapr/kruskal_model.hpp"
#include "cpapr/phi_strategy.hpp"
#include "cpapr/policy.hpp"
#include "cpapr/sparse_tensor.hpp"

namespace cpapr {

struct PhiRunOptions {
  std::size_t worker_budget = 0;  // 0: hardware concurrency
  bool count = false;             // collect KernelStats (slower)
};

struct PhiResult {
  DenseMatrix phi;
  // Set for perturbed runs: the numbers are timing artefacts, not Phi.
  bool perturbed = false;
  KernelStats stats;
};

/// Arguments of one Phi launch; `perm` is required for ChunkedSorted.
struct PhiLaunch {
  const SparseTensor& tensor;
  const DenseMatrix& B;
  const PiMatrix& pi;
  double epsilon;
  const KernelSchedule& schedule;
  const Permutation* perm;
  DenseMatrix& phi;
};

using PhiKernelFn = KernelStats (*)(const PhiLaunch&);

/// Statically compiled kernel body for one (strategy, perturbation) pair.
PhiKernelFn perturb_kernel(PhiVariant variant, PerturbationMode mode, bool count = false);

/// Phi(i, r) = sum over nonzeros j in row i of x_j / max(<B(i,:), Pi(j,:)>, eps) * Pi(j, r).
///
/// `phi` is resized/zeroed as needed. For ChunkedSorted a null `perm` makes the
/// call sort the mode itself.
KernelStats compute_phi_into(DenseMatrix& phi, const SparseTensor& tensor, const DenseMatrix& B,
                             const PiMatrix& pi, std::size_t mode, double epsilon,
                             const PhiStrategy& strategy, const PolicyParams& policy,
                             PerturbationMode perturbation = PerturbationMode::None,
                             const Permutation* perm = nullptr, const PhiRunOptions& run = {});

PhiResult compute_phi(const SparseTensor& tensor, const DenseMatrix& B, const PiMatrix& pi,
                      std::size_t mode, double epsilon, const PhiStrategy& strategy,
                      const PolicyParams& policy,
                      PerturbationMode perturbation = PerturbationMode::None,
                      const Permutation* perm = nullptr, const PhiRunOptions& run = {});

}  // namespace cpapr
