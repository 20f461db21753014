#include "cpapr/report.hpp"

#include <cstdio>
#include <ostream>

#include "cpapr/error.hpp"

namespace cpapr {

std::array<KernelShare, 4> report_kernel_breakdown(const SolverTrace& trace) {
  if (trace.visits.empty()) throw ContractError("empty trace");
  std::array<KernelShare, 4> shares{{{"phi"}, {"pi"}, {"kkt"}, {"mu"}}};
  for (const auto& visit : trace.visits) {
    shares[1].ms += visit.pi_ms;
    for (const auto& rec : visit.inner) {
      shares[0].ms += rec.phi_ms;
      shares[2].ms += rec.kkt_ms;
      shares[3].ms += rec.mu_ms;
    }
  }
  double total = 0;
  for (const auto& s : shares) total += s.ms;
  for (auto& s : shares) s.percent = total > 0 ? 100.0 * s.ms / total : 25.0;
  return shares;
}

void write_breakdown_csv(std::ostream& out, const std::array<KernelShare, 4>& shares) {
  char buf[128];
  out << "kernel,ms,percent\n";
  for (const auto& s : shares) {
    std::snprintf(buf, sizeof(buf), "%s,%.6f,%.4f\n", s.kernel.c_str(), s.ms, s.percent);
    out << buf;
  }
}

}  // namespace cpapr
