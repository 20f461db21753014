#include "cpapr/phi_kernel.hpp"

#include <algorithm>
#include <optional>

#include "cpapr/error.hpp"

namespace cpapr {
namespace {

using detail::ScatterFlags;

template <ScatterFlags F>
struct PhiContribution {
  const double* B;
  std::size_t b_rows;
  const double* pi;
  std::size_t pi_rows;
  const double* x;
  std::size_t R;
  double epsilon;

  template <class Sink>
  void operator()(std::size_t j, std::size_t i, std::size_t worker, Sink&& sink,
                  KernelStats& stats) const {
    const double* b = B + detail::mapped_row<F>(i, worker, b_rows) * R;
    const double* p = pi + detail::mapped_row<F>(j, worker, pi_rows) * R;
    double s = 0.0;
    for (std::size_t r = 0; r < R; ++r) {
      s += b[r] * p[r];
      if constexpr (F.count) stats.flops += 2;
    }
    s = x[j] / std::max(s, epsilon);
    if constexpr (F.count) stats.flops += 2;
    for (std::size_t r = 0; r < R; ++r) {
      sink(r, s * p[r]);
      if constexpr (F.count) ++stats.flops;
    }
  }
};

template <PhiVariant V, ScatterFlags F>
KernelStats phi_body(const PhiLaunch& a) {
  const PhiContribution<F> contrib{a.B.data(),  a.B.rows(),        a.pi.entries.data(),
                                   a.pi.entries.rows(), a.tensor.values().data(), a.B.cols(),
                                   a.epsilon};
  const auto rows = a.tensor.indices(a.pi.mode);
  if constexpr (V == PhiVariant::AtomicPerNonzero)
    return detail::scatter_atomic<F>(a.schedule, rows, a.phi, contrib);
  else
    return detail::scatter_chunked<F>(a.schedule, a.perm->order, rows, a.phi, contrib);
}

template <PhiVariant V, bool Count>
PhiKernelFn select_flags(PerturbationMode mode) {
  switch (mode) {
    case PerturbationMode::None:
      return &phi_body<V, ScatterFlags{true, false, Count}>;
    case PerturbationMode::NoAtomics:
      return &phi_body<V, ScatterFlags{false, false, Count}>;
    case PerturbationMode::FixedRow:
      return &phi_body<V, ScatterFlags{true, true, Count}>;
    case PerturbationMode::Both:
      return &phi_body<V, ScatterFlags{false, true, Count}>;
  }
  return nullptr;
}

}  // namespace

PhiKernelFn perturb_kernel(PhiVariant variant, PerturbationMode mode, bool count) {
  if (variant == PhiVariant::AtomicPerNonzero)
    return count ? select_flags<PhiVariant::AtomicPerNonzero, true>(mode)
                 : select_flags<PhiVariant::AtomicPerNonzero, false>(mode);
  return count ? select_flags<PhiVariant::ChunkedSorted, true>(mode)
               : select_flags<PhiVariant::ChunkedSorted, false>(mode);
}

KernelStats compute_phi_into(DenseMatrix& phi, const SparseTensor& tensor, const DenseMatrix& B,
                             const PiMatrix& pi, std::size_t mode, double epsilon,
                             const PhiStrategy& strategy, const PolicyParams& policy,
                             PerturbationMode perturbation, const Permutation* perm,
                             const PhiRunOptions& run) {
  if (mode >= tensor.order()) throw ContractError("mode out of range");
  if (pi.mode != mode) throw ContractError("Pi matrix was built for a different mode");
  if (B.rows() != tensor.dim(mode)) throw ContractError("B row count does not match tensor dim");
  if (pi.entries.rows() != tensor.nnz() || pi.entries.cols() != B.cols())
    throw ContractError("Pi matrix shape does not match nnz x R");
  if (!(epsilon > 0.0)) throw ContractError("epsilon must be positive");

  std::optional<Permutation> local_perm;
  if (strategy.variant == PhiVariant::ChunkedSorted) {
    if (perm == nullptr) {
      local_perm = build_permutation(tensor, mode);
      perm = &*local_perm;
    } else if (perm->mode != mode || perm->order.size() != tensor.nnz()) {
      throw ContractError("permutation does not belong to this tensor mode");
    }
  }

  if (!phi.same_shape(B))
    phi = DenseMatrix(B.rows(), B.cols());
  else
    phi.fill(0.0);

  const KernelSchedule schedule =
      map_policy_to_kernel(policy, strategy, tensor.nnz(), run.worker_budget);
  const PhiLaunch launch{tensor, B, pi, epsilon, schedule, perm, phi};
  return perturb_kernel(strategy.variant, perturbation, run.count)(launch);
}

PhiResult compute_phi(const SparseTensor& tensor, const DenseMatrix& B, const PiMatrix& pi,
                      std::size_t mode, double epsilon, const PhiStrategy& strategy,
                      const PolicyParams& policy, PerturbationMode perturbation,
                      const Permutation* perm, const PhiRunOptions& run) {
  PhiResult result;
  result.stats = compute_phi_into(result.phi, tensor, B, pi, mode, epsilon, strategy, policy,
                                  perturbation, perm, run);
  result.perturbed = perturbation != PerturbationMode::None;
  return result;
}

}  // namespace cpapr
