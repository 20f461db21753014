#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "cpapr/dense_matrix.hpp"
#include "cpapr/kruskal_model.hpp"
#include "cpapr/phi_strategy.hpp"
#include "cpapr/policy.hpp"
#include "cpapr/sparse_tensor.hpp"

namespace cpapr {

struct SolverOptions {
  std::size_t rank = 1;
  std::size_t max_outer = 1000;
  std::size_t max_inner = 10;
  double epsilon = 1e-10;    // minimum divisor in Phi
  double kappa = 1e-2;       // offset added to inadmissible zeros
  double kappa_tol = 1e-10;  // entries below this count as zero
  double kkt_tol = 1e-4;
  std::uint64_t seed = 1;
  PhiStrategy strategy;
  PerturbationMode perturbation = PerturbationMode::None;
  PolicyParams policy{1, 1, 128};
  std::size_t worker_budget = 0;  // 1 gives the sequential, bit-reproducible mode
};

/// Throws ContractError naming the first violated constraint.
void validate(const SolverOptions& options);

struct InnerRecord {
  std::size_t outer;
  std::size_t mode;
  std::size_t inner;
  double phi_ms;
  double kkt_ms;
  double mu_ms;  // 0 on the inner iteration that stopped on the KKT test
  double kkt;
};

struct ModeVisit {
  std::size_t outer;
  std::size_t mode;
  double pi_ms;
  std::size_t scooched;  // entries nudged off zero before this visit
  std::vector<InnerRecord> inner;
};

struct SolverTrace {
  std::vector<ModeVisit> visits;
  std::vector<double> objective;  // after each outer iteration
  std::vector<double> kkt;        // max over modes, per outer iteration
  std::size_t outer_iterations = 0;
  std::size_t inner_iterations = 0;
  bool converged = false;
  bool perturbed = false;  // factors are meaningless if set
};

struct SolverResult {
  KruskalModel model;
  SolverTrace trace;
};

/// B * Phi elementwise.
DenseMatrix mu_update(const DenseMatrix& B, const DenseMatrix& phi);
void mu_update_inplace(DenseMatrix& B, const DenseMatrix& phi);

/// (A + S) diag(lambda), S(i,r) = kappa where A(i,r) < kappa_tol and
/// phi_prev(i,r) > 1. An empty phi_prev means S = 0. `scooched` receives the
/// number of nudged entries when non-null.
DenseMatrix apply_scooch(const DenseMatrix& A, const DenseMatrix& phi_prev,
                         const std::vector<double>& lambda, double kappa, double kappa_tol,
                         std::size_t* scooched = nullptr);

/// max |min(B, 1 - Phi)| over all entries.
double kkt_violation(const DenseMatrix& B, const DenseMatrix& phi);

/// sum_r lambda_r - sum_j x_j log(max(m_j, eps)), m_j the model at nonzero j.
double log_likelihood(const SparseTensor& tensor, const KruskalModel& model,
                      double epsilon = 1e-10);

/// CP-APR with multiplicative updates starting from init_model(dims, R, seed).
SolverResult cp_apr_mu(const SparseTensor& tensor, const SolverOptions& options);

/// Same, from a caller-supplied initial model.
SolverResult cp_apr_mu(const SparseTensor& tensor, const SolverOptions& options,
                       KruskalModel initial);

/// CSV: outer,mode,inner,phi_ms,objective,kkt
void write_trace_csv(std::ostream& out, const SolverTrace& trace);

}  // namespace cpapr
