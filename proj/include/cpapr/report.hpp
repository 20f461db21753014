#pragma once

#include <array>
#include <iosfwd>
#include <string>

#include "cpapr/cpapr_mu.hpp"

namespace cpapr {

struct KernelShare {
  std::string kernel;  // phi, pi, kkt, mu
  double ms = 0;
  double percent = 0;
};

/// Phi, Pi, KKT and MU-update time summed over the trace, with each as a
/// percentage of their total. Throws ContractError("empty trace") when the
/// trace holds no mode visits.
std::array<KernelShare, 4> report_kernel_breakdown(const SolverTrace& trace);

/// CSV: kernel,ms,percent
void write_breakdown_csv(std::ostream& out, const std::array<KernelShare, 4>& shares);

}  // namespace cpapr
