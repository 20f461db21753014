#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "cpapr/kruskal_model.hpp"
#include "cpapr/phi_kernel.hpp"
#include "cpapr/sparse_tensor.hpp"

namespace cpapr {

/// Frozen Phi inputs for every mode of one tensor (B = A Lambda from a
/// normalized seeded model, Pi, permutation), so kernel variants can be timed
/// on identical data. Pi construction is not part of any measurement.
class PhiWorkload {
 public:
  PhiWorkload(const SparseTensor& tensor, std::size_t rank, std::uint64_t seed,
              double epsilon = 1e-10, std::size_t worker_budget = 0);

  const SparseTensor& tensor() const { return *tensor_; }
  std::size_t order() const { return tensor_->order(); }
  const DenseMatrix& B(std::size_t mode) const { return B_[mode]; }
  const PiMatrix& pi(std::size_t mode) const { return pi_[mode]; }
  const Permutation& perm(std::size_t mode) const { return perms_[mode]; }

  /// Wall time in ms of each of `reps` Phi launches on `mode`, after one
  /// untimed warm-up launch.
  std::vector<double> time_mode(std::size_t mode, const PhiStrategy& strategy,
                                const PolicyParams& policy, PerturbationMode perturbation,
                                std::size_t reps, std::size_t worker_budget = 0) const;

  /// Per-rep wall time summed over all modes.
  std::vector<double> time_all_modes(const PhiStrategy& strategy, const PolicyParams& policy,
                                     PerturbationMode perturbation, std::size_t reps,
                                     std::size_t worker_budget = 0) const;

  /// One instrumented launch per mode; stats summed over modes.
  KernelStats count_all_modes(const PhiStrategy& strategy, const PolicyParams& policy,
                              PerturbationMode perturbation, std::size_t worker_budget = 0) const;

  PhiResult run(std::size_t mode, const PhiStrategy& strategy, const PolicyParams& policy,
                PerturbationMode perturbation, std::size_t worker_budget = 0) const;

 private:
  const SparseTensor* tensor_;
  double epsilon_;
  std::vector<DenseMatrix> B_;
  std::vector<PiMatrix> pi_;
  std::vector<Permutation> perms_;
};

double mean(const std::vector<double>& values);

}  // namespace cpapr
