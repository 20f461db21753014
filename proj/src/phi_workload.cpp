#include "cpapr/phi_workload.hpp"

#include <chrono>
#include <numeric>

#include "cpapr/cpapr_mu.hpp"
#include "cpapr/error.hpp"

namespace cpapr {

double mean(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

PhiWorkload::PhiWorkload(const SparseTensor& tensor, std::size_t rank, std::uint64_t seed,
                         double epsilon, std::size_t worker_budget)
    : tensor_(&tensor), epsilon_(epsilon) {
  if (tensor.nnz() == 0) throw ContractError("Phi workload needs a nonempty tensor");
  KruskalModel model = init_model(tensor.dims(), rank, seed);
  normalize_all(model);
  const int threads = static_cast<int>(worker_budget);
  for (std::size_t n = 0; n < tensor.order(); ++n) {
    B_.push_back(apply_scooch(model.factors[n], {}, model.weights, 0.0, 1.0));
    pi_.push_back(compute_pi(model, tensor, n, threads));
    perms_.push_back(build_permutation(tensor, n));
  }
}

PhiResult PhiWorkload::run(std::size_t mode, const PhiStrategy& strategy,
                           const PolicyParams& policy, PerturbationMode perturbation,
                           std::size_t worker_budget) const {
  return compute_phi(*tensor_, B_[mode], pi_[mode], mode, epsilon_, strategy, policy,
                     perturbation, &perms_[mode], {worker_budget, false});
}

std::vector<double> PhiWorkload::time_mode(std::size_t mode, const PhiStrategy& strategy,
                                           const PolicyParams& policy,
                                           PerturbationMode perturbation, std::size_t reps,
                                           std::size_t worker_budget) const {
  if (reps < 1) throw ContractError("reps must be at least 1");
  DenseMatrix phi(B_[mode].rows(), B_[mode].cols());
  const PhiRunOptions run{worker_budget, false};
  auto launch = [&] {
    compute_phi_into(phi, *tensor_, B_[mode], pi_[mode], mode, epsilon_, strategy, policy,
                     perturbation, &perms_[mode], run);
  };
  launch();
  std::vector<double> samples;
  samples.reserve(reps);
  for (std::size_t k = 0; k < reps; ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    launch();
    samples.push_back(
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
  }
  return samples;
}

std::vector<double> PhiWorkload::time_all_modes(const PhiStrategy& strategy,
                                                const PolicyParams& policy,
                                                PerturbationMode perturbation, std::size_t reps,
                                                std::size_t worker_budget) const {
  std::vector<double> total(reps, 0.0);
  for (std::size_t n = 0; n < order(); ++n) {
    const auto samples = time_mode(n, strategy, policy, perturbation, reps, worker_budget);
    for (std::size_t k = 0; k < reps; ++k) total[k] += samples[k];
  }
  return total;
}

KernelStats PhiWorkload::count_all_modes(const PhiStrategy& strategy, const PolicyParams& policy,
                                         PerturbationMode perturbation,
                                         std::size_t worker_budget) const {
  KernelStats total;
  for (std::size_t n = 0; n < order(); ++n) {
    total += compute_phi(*tensor_, B_[n], pi_[n], n, epsilon_, strategy, policy, perturbation,
                         &perms_[n], {worker_budget, true})
                 .stats;
  }
  return total;
}

}  // namespace cpapr
