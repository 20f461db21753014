#include "cpapr/ppa.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "cpapr/error.hpp"
#include "cpapr/phi_workload.hpp"

namespace cpapr {

double geometric_mean(std::span<const double> values) {
  if (values.empty()) throw ContractError("geometric mean of an empty set");
  double log_sum = 0.0;
  for (double v : values) {
    if (!(v > 0.0)) throw ContractError("geometric mean needs positive values");
    log_sum += std::log(v);
  }
  return std::exp(log_sum / static_cast<double>(values.size()));
}

PpaReport run_ppa(const std::vector<NamedTensor>& tensors, const SolverOptions& options,
                  const PolicyParams& policy, std::size_t reps,
                  std::optional<PhiVariant> baseline_variant) {
  if (reps < 1) throw ContractError("reps must be at least 1");
  if (tensors.empty()) throw ContractError("PPA needs at least one tensor");
  validate(policy);

  PpaReport report;
  report.variant = options.strategy.variant;
  report.baseline_variant = baseline_variant.value_or(options.strategy.variant);
  PhiStrategy baseline_strategy = options.strategy;
  baseline_strategy.variant = report.baseline_variant;
  const bool separate_baseline = report.baseline_variant != report.variant;

  std::array<std::vector<double>, 4> speedups;
  for (const auto& named : tensors) {
    const PhiWorkload work(named.tensor, options.rank, options.seed, options.epsilon,
                           options.worker_budget);
    std::array<double, 4> times{};
    for (std::size_t p = 0; p < 4; ++p) {
      times[p] = mean(work.time_all_modes(options.strategy, policy, kAllPerturbations[p], reps,
                                          options.worker_budget));
    }
    const double baseline =
        separate_baseline ? mean(work.time_all_modes(baseline_strategy, policy,
                                                     PerturbationMode::None, reps,
                                                     options.worker_budget))
                          : times[0];
    report.tensors.push_back(named.name);
    report.baseline_ms.push_back(baseline);
    for (std::size_t p = 0; p < 4; ++p) {
      const auto mode = kAllPerturbations[p];
      const KernelStats stats =
          work.count_all_modes(options.strategy, policy, mode, options.worker_budget);
      const double speedup = baseline / times[p];
      speedups[p].push_back(speedup);
      report.entries.push_back(
          {named.name, mode, times[p], speedup, mode == PerturbationMode::None, stats.nonzeros});
    }
  }
  for (std::size_t p = 0; p < 4; ++p) report.geomean[p] = geometric_mean(speedups[p]);
  return report;
}

void write_ppa_csv(std::ostream& out, const PpaReport& report) {
  char buf[256];
  out << "tensor,perturbation,mean_ms,speedup,valid\n";
  for (const auto& e : report.entries) {
    std::snprintf(buf, sizeof(buf), "%s,%s,%.6f,%.6f,%d\n", e.tensor.c_str(),
                  to_string(e.perturbation).c_str(), e.mean_ms, e.speedup, e.valid ? 1 : 0);
    out << buf;
  }
  for (std::size_t p = 0; p < 4; ++p) {
    std::snprintf(buf, sizeof(buf), "geomean,%s,,%.6f,\n",
                  to_string(kAllPerturbations[p]).c_str(), report.geomean[p]);
    out << buf;
  }
}

void write_ppa_gnuplot(std::ostream& out, const std::string& csv_path) {
  out << "set datafile separator ','\n"
         "set style data histograms\n"
         "set style histogram clustered\n"
         "set style fill solid border -1\n"
         "set ylabel 'speedup over baseline'\n"
         "set key top left\n"
         "set xtics rotate by -30\n"
         "plot for [p in 'no-atomics fixed-row both'] \\\n"
         "  '< grep ,'.p.', "
      << csv_path << "' using 4:xtic(1) title p\n";
}

}  // namespace cpapr
