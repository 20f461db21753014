#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cpapr/cpapr_mu.hpp"
#include "cpapr/phi_strategy.hpp"
#include "cpapr/policy.hpp"
#include "cpapr/sparse_tensor.hpp"

namespace cpapr {

/// exp(mean(log v)). Throws ContractError on empty input or values <= 0.
double geometric_mean(std::span<const double> values);

struct NamedTensor {
  std::string name;
  SparseTensor tensor;
};

struct PpaEntry {
  std::string tensor;
  PerturbationMode perturbation;
  double mean_ms;
  double speedup;          // baseline_ms / mean_ms
  bool valid;              // false whenever the kernel was perturbed
  std::size_t nonzeros;    // instrumented count over all modes
};

struct PpaReport {
  PhiVariant variant;           // kernel under perturbation
  PhiVariant baseline_variant;  // unperturbed kernel speedups are relative to
  std::vector<std::string> tensors;
  std::vector<double> baseline_ms;  // per tensor
  std::vector<PpaEntry> entries;    // tensor-major, perturbations in kAllPerturbations order
  std::array<double, 4> geomean{};  // indexed like kAllPerturbations

  double geomean_of(PerturbationMode mode) const { return geomean[static_cast<std::size_t>(mode)]; }
};

/// Times the Phi kernel (all modes) under None, NoAtomics, FixedRow and Both
/// with the same data, policy and worker budget. Uses options.rank, seed,
/// epsilon, strategy and worker_budget. With `baseline_variant` set, speedups
/// compare against that variant's unperturbed kernel instead.
PpaReport run_ppa(const std::vector<NamedTensor>& tensors, const SolverOptions& options,
                  const PolicyParams& policy, std::size_t reps,
                  std::optional<PhiVariant> baseline_variant = std::nullopt);

/// CSV: tensor,perturbation,mean_ms,speedup,valid, then one geomean row per
/// perturbation.
void write_ppa_csv(std::ostream& out, const PpaReport& report);

/// Gnuplot script drawing the speedup bars from a CSV written by write_ppa_csv.
void write_ppa_gnuplot(std::ostream& out, const std::string& csv_path);

}  // namespace cpapr
