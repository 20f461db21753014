#include "cpapr/grid_search.hpp"

#include <chrono>
#include <cstdio>
#include <map>
#include <ostream>
#include <set>

#include "cpapr/error.hpp"
#include "cpapr/phi_workload.hpp"

namespace cpapr {
namespace {

struct PolicyTimes {
  std::vector<double> per_mode;
  double solver_ms = 0.0;
};

PolicyTimes measure(const PhiWorkload& work, const SparseTensor& tensor,
                    const SolverOptions& options, const PolicyParams& policy, std::size_t reps,
                    bool full_solver) {
  PolicyTimes t;
  for (std::size_t n = 0; n < work.order(); ++n)
    t.per_mode.push_back(mean(work.time_mode(n, options.strategy, policy, options.perturbation,
                                             reps, options.worker_budget)));
  if (full_solver) {
    SolverOptions o = options;
    o.policy = policy;
    std::vector<double> samples;
    for (std::size_t k = 0; k < reps; ++k) {
      const auto t0 = std::chrono::steady_clock::now();
      cp_apr_mu(tensor, o);
      samples.push_back(std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - t0)
                            .count());
    }
    t.solver_ms = mean(samples);
  }
  return t;
}

}  // namespace

GridResult grid_search(const SparseTensor& tensor, const SolverOptions& options,
                       const PolicySpace& space, const PolicyParams& baseline, std::size_t reps,
                       bool full_solver) {
  if (reps < 1) throw ContractError("reps must be at least 1");
  if (!baseline.valid()) throw ContractError("baseline policy is invalid: " + to_string(baseline));
  validate(options);

  GridResult result;
  result.baseline = baseline;
  result.order = tensor.order();
  result.skipped = skipped_policies(space, tensor.nnz());
  const auto policies = enumerate_policies(space, tensor.nnz());

  const PhiWorkload work(tensor, options.rank, options.seed, options.epsilon,
                         options.worker_budget);
  const PolicyTimes base = measure(work, tensor, options, baseline, reps, full_solver);

  for (const auto& policy : policies) {
    const PolicyTimes t =
        policy == baseline ? base : measure(work, tensor, options, policy, reps, full_solver);
    for (std::size_t n = 0; n < t.per_mode.size(); ++n)
      result.rows.push_back(
          {policy, n, GridTarget::PhiOnly, t.per_mode[n], base.per_mode[n] / t.per_mode[n]});
    if (full_solver)
      result.rows.push_back(
          {policy, std::nullopt, GridTarget::FullSolver, t.solver_ms, base.solver_ms / t.solver_ms});
  }
  return result;
}

void write_grid_csv(std::ostream& out, const GridResult& result) {
  char buf[256];
  out << "league,team,vector,mode,target,mean_ms,speedup,valid\n";
  for (const auto& row : result.rows) {
    const std::string mode = row.mode ? std::to_string(*row.mode) : "all";
    std::snprintf(buf, sizeof(buf), "%zu,%zu,%zu,%s,%s,%.6f,%.6f,1\n", row.policy.league_size,
                  row.policy.team_size, row.policy.vector_size, mode.c_str(),
                  row.target == GridTarget::PhiOnly ? "phi" : "wall", row.mean_ms, row.speedup);
    out << buf;
  }
  for (const auto& p : result.skipped) {
    std::snprintf(buf, sizeof(buf), "%zu,%zu,%zu,,skipped,,,0\n", p.league_size, p.team_size,
                  p.vector_size);
    out << buf;
  }
}

void write_grid_heatmap(std::ostream& out, const GridResult& result) {
  std::map<std::size_t, std::map<std::pair<std::size_t, std::size_t>, double>> cells;
  std::set<std::size_t> teams, vectors;
  for (const auto& row : result.rows) {
    if (row.target != GridTarget::PhiOnly) continue;
    cells[row.policy.league_size][{row.policy.team_size, row.policy.vector_size}] += row.mean_ms;
    teams.insert(row.policy.team_size);
    vectors.insert(row.policy.vector_size);
  }
  char buf[64];
  bool first = true;
  for (const auto& [league, grid] : cells) {
    if (!first) out << "\n\n";
    first = false;
    out << "# league " << league << ": rows team size, columns vector size, Phi ms\n";
    out << vectors.size();
    for (auto v : vectors) out << ' ' << v;
    out << '\n';
    for (auto t : teams) {
      out << t;
      for (auto v : vectors) {
        auto it = grid.find({t, v});
        if (it == grid.end()) {
          out << " NaN";
        } else {
          std::snprintf(buf, sizeof(buf), " %.6f", it->second);
          out << buf;
        }
      }
      out << '\n';
    }
  }
}

}  // namespace cpapr
