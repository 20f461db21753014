#include "cpapr/mttkrp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <random>

#include "cpapr/detail/row_scatter.hpp"
#include "cpapr/error.hpp"
#include "cpapr/kruskal_model.hpp"

namespace cpapr {
namespace {

struct MttkrpContribution {
  const SparseTensor* tensor;
  const std::vector<DenseMatrix>* factors;
  std::size_t mode;
  std::size_t R;

  template <class Sink>
  void operator()(std::size_t j, std::size_t, std::size_t, Sink&& sink, KernelStats&) const {
    const double v = tensor->value(j);
    const std::size_t order = tensor->order();
    for (std::size_t r = 0; r < R; ++r) {
      double t = 1.0;
      for (std::size_t m = 0; m < order; ++m) {
        if (m == mode) continue;
        t *= (*factors)[m](tensor->coord(j, m), r);
      }
      sink(r, v * t);
    }
  }
};

}  // namespace

DenseMatrix mttkrp(const SparseTensor& tensor, const std::vector<DenseMatrix>& factors,
                   std::size_t mode, const MttkrpRun& run) {
  if (mode >= tensor.order()) throw ContractError("mode out of range");
  if (factors.size() != tensor.order()) throw ContractError("one factor per mode required");
  const std::size_t R = factors.front().cols();
  for (std::size_t m = 0; m < factors.size(); ++m) {
    if (factors[m].rows() != tensor.dim(m) || factors[m].cols() != R)
      throw ContractError("factor " + std::to_string(m) + " shape mismatch");
  }

  DenseMatrix out(tensor.dim(mode), R);
  const KernelSchedule schedule =
      map_policy_to_kernel(run.policy, run.strategy, tensor.nnz(), run.worker_budget);
  const MttkrpContribution contrib{&tensor, &factors, mode, R};
  constexpr detail::ScatterFlags flags{};
  if (run.strategy.variant == PhiVariant::AtomicPerNonzero) {
    detail::scatter_atomic<flags>(schedule, tensor.indices(mode), out, contrib);
  } else {
    std::optional<Permutation> local;
    const Permutation* perm = run.perm;
    if (perm == nullptr) {
      local = build_permutation(tensor, mode);
      perm = &*local;
    } else if (perm->mode != mode || perm->order.size() != tensor.nnz()) {
      throw ContractError("permutation does not belong to this tensor mode");
    }
    detail::scatter_chunked<flags>(schedule, perm->order, tensor.indices(mode), out, contrib);
  }
  return out;
}

double mttkrp_bytes(std::size_t nnz, std::size_t order, std::size_t rank) {
  const double n = static_cast<double>(nnz);
  const double R = static_cast<double>(rank);
  return n * (8.0 + static_cast<double>(order - 1) * R * 8.0 + R * 16.0);
}

BandwidthResult mttkrp_bandwidth(const SparseTensor& tensor, const MttkrpBenchOptions& o) {
  if (o.reps < 2) throw ContractError("MTTKRP bandwidth needs reps >= 2 (the first is a warm-up)");
  if (tensor.nnz() == 0) throw ContractError("MTTKRP bandwidth needs a nonempty tensor");
  const KruskalModel model = init_model(tensor.dims(), o.rank, o.seed);
  const std::vector<Permutation> perms = build_permutations(tensor);
  const std::size_t order = tensor.order();

  auto run_for = [&](std::size_t mode) {
    MttkrpRun run = o.run;
    run.perm = &perms[mode];
    return run;
  };

  using Clock = std::chrono::steady_clock;
  std::vector<double> seconds;
  std::vector<DenseMatrix> last(order);
  for (std::size_t rep = 0; rep < o.reps; ++rep) {
    double total = 0.0;
    for (std::size_t n = 0; n < order; ++n) {
      const auto t0 = Clock::now();
      last[n] = mttkrp(tensor, model.factors, n, run_for(n));
      total += std::chrono::duration<double>(Clock::now() - t0).count();
    }
    if (rep > 0) seconds.push_back(total);
  }

  bool valid = true;
  for (std::size_t n = 0; n < order && valid; ++n) {
    const DenseMatrix ref = mttkrp(tensor, model.factors, n,
                                   {{PhiVariant::AtomicPerNonzero, std::nullopt}, {1, 1, 1}, 1});
    for (std::size_t k = 0; k < ref.size(); ++k) {
      const double a = ref.data()[k], b = last[n].data()[k];
      if (std::abs(a - b) > 1e-10 * std::max({1.0, std::abs(a), std::abs(b)})) {
        valid = false;
        break;
      }
    }
  }

  BandwidthResult r;
  r.kernel = "mttkrp";
  r.workload = o.label;
  r.reps = o.reps;
  r.bytes = mttkrp_bytes(tensor.nnz(), order, o.rank) * static_cast<double>(order);
  const double best = *std::min_element(seconds.begin(), seconds.end());
  double sum = 0;
  for (double s : seconds) sum += s;
  r.best_gbs = r.bytes / best / 1e9;
  r.mean_gbs = r.bytes / (sum / static_cast<double>(seconds.size())) / 1e9;
  r.validated = valid;
  return r;
}

}  // namespace cpapr
