#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include "cpapr/cpapr_mu.hpp"
#include "cpapr/policy.hpp"
#include "cpapr/sparse_tensor.hpp"

namespace cpapr {

enum class GridTarget { PhiOnly, FullSolver };

struct GridRow {
  PolicyParams policy;
  std::optional<std::size_t> mode;  // empty for FullSolver (whole run)
  GridTarget target;
  double mean_ms;
  double speedup;  // baseline mean / this mean, same mode and target
};

struct GridResult {
  PolicyParams baseline;
  std::size_t order = 0;
  std::vector<GridRow> rows;             // valid policies only
  std::vector<PolicyParams> skipped;     // violate team x vector <= 1024; never timed
};

/// Times the Phi kernel for every valid policy of `space`, per mode, mean of
/// `reps` runs; with `full_solver` also the whole cp_apr_mu run under
/// `options`. Policies run one at a time. Measurements of a policy equal to
/// the baseline are reused, so its speedup is exactly 1.
GridResult grid_search(const SparseTensor& tensor, const SolverOptions& options,
                       const PolicySpace& space, const PolicyParams& baseline, std::size_t reps,
                       bool full_solver = false);

/// CSV: league,team,vector,mode,target,mean_ms,speedup,valid
void write_grid_csv(std::ostream& out, const GridResult& result);

/// Gnuplot nonuniform-matrix blocks, one per league size: rows team size,
/// columns vector size, cell = Phi time summed over modes (NaN when absent).
void write_grid_heatmap(std::ostream& out, const GridResult& result);

}  // namespace cpapr
