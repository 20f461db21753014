#pragma once

#include <iosfwd>
#include <string>

#include "cpapr/cpapr_mu.hpp"

namespace cpapr {

/// Sets one option by key. Keys: rank, max_outer, max_inner, epsilon, kappa,
/// kappa_tol, kkt_tol, seed, strategy, chunk_size, perturbation, policy,
/// threads. Throws InputError on unknown keys or unparsable values.
void apply_option(SolverOptions& options, const std::string& key, const std::string& value);

/// Reads `key = value` lines ('#' comments, blank lines ignored) on top of `base`.
SolverOptions read_solver_config(std::istream& in, SolverOptions base = {});
SolverOptions read_solver_config_file(const std::string& path, SolverOptions base = {});

}  // namespace cpapr
