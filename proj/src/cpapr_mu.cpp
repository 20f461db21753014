#include "cpapr/cpapr_mu.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "cpapr/error.hpp"
#include "cpapr/phi_kernel.hpp"

namespace cpapr {
namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void require_same_shape(const DenseMatrix& a, const DenseMatrix& b, const char* what) {
  if (!a.same_shape(b)) throw ContractError(std::string(what) + ": matrix shapes differ");
}

}  // namespace

void validate(const SolverOptions& o) {
  if (o.rank < 1) throw ContractError("rank must be at least 1");
  if (o.max_outer < 1) throw ContractError("max_outer must be at least 1");
  if (o.max_inner < 1) throw ContractError("max_inner must be at least 1");
  if (!(o.epsilon > 0.0)) throw ContractError("epsilon must be positive");
  if (!(o.kappa >= 0.0)) throw ContractError("kappa must be nonnegative");
  if (!(o.kappa_tol > 0.0)) throw ContractError("kappa_tol must be positive");
  if (!(o.kkt_tol > 0.0)) throw ContractError("kkt_tol must be positive");
  if (o.strategy.chunk_size && *o.strategy.chunk_size < 1)
    throw ContractError("chunk size V must be at least 1");
  validate(o.policy);
}

DenseMatrix mu_update(const DenseMatrix& B, const DenseMatrix& phi) {
  DenseMatrix out = B;
  mu_update_inplace(out, phi);
  return out;
}

void mu_update_inplace(DenseMatrix& B, const DenseMatrix& phi) {
  require_same_shape(B, phi, "mu_update");
  double* b = B.data();
  const double* p = phi.data();
  for (std::size_t k = 0; k < B.size(); ++k) b[k] *= p[k];
}

DenseMatrix apply_scooch(const DenseMatrix& A, const DenseMatrix& phi_prev,
                         const std::vector<double>& lambda, double kappa, double kappa_tol,
                         std::size_t* scooched) {
  if (lambda.size() != A.cols()) throw ContractError("apply_scooch: lambda length != rank");
  const bool have_prev = phi_prev.size() != 0;
  if (have_prev) require_same_shape(A, phi_prev, "apply_scooch");
  std::size_t count = 0;
  DenseMatrix B(A.rows(), A.cols());
  for (std::size_t i = 0; i < A.rows(); ++i) {
    for (std::size_t r = 0; r < A.cols(); ++r) {
      double a = A(i, r);
      if (have_prev && a < kappa_tol && phi_prev(i, r) > 1.0) {
        a += kappa;
        ++count;
      }
      B(i, r) = a * lambda[r];
    }
  }
  if (scooched) *scooched = count;
  return B;
}

double kkt_violation(const DenseMatrix& B, const DenseMatrix& phi) {
  require_same_shape(B, phi, "kkt_violation");
  double worst = 0.0;
  const double* b = B.data();
  const double* p = phi.data();
  for (std::size_t k = 0; k < B.size(); ++k)
    worst = std::max(worst, std::abs(std::min(b[k], 1.0 - p[k])));
  return worst;
}

double log_likelihood(const SparseTensor& tensor, const KruskalModel& model, double epsilon) {
  double total = 0.0;
  for (double w : model.weights) total += w;
  double fit = 0.0;
  for (std::size_t j = 0; j < tensor.nnz(); ++j) {
    const double x = tensor.value(j);
    if (x == 0.0) continue;
    fit += x * std::log(std::max(model.value_at(tensor, j), epsilon));
  }
  return total - fit;
}

SolverResult cp_apr_mu(const SparseTensor& tensor, const SolverOptions& options) {
  validate(options);
  return cp_apr_mu(tensor, options, init_model(tensor.dims(), options.rank, options.seed));
}

SolverResult cp_apr_mu(const SparseTensor& tensor, const SolverOptions& options,
                       KruskalModel model) {
  validate(options);
  if (tensor.nnz() == 0) throw ContractError("cp_apr_mu needs a nonempty tensor");
  if (model.rank() != options.rank) throw ContractError("initial model rank != options.rank");
  check_compatible(model, tensor);

  const std::size_t order = tensor.order();
  const int threads = static_cast<int>(options.worker_budget == 0 ? default_worker_budget()
                                                                  : options.worker_budget);
  const PhiRunOptions run{static_cast<std::size_t>(threads), false};

  std::vector<Permutation> perms;
  if (options.strategy.variant == PhiVariant::ChunkedSorted) perms = build_permutations(tensor);

  normalize_all(model);

  SolverResult result;
  SolverTrace& trace = result.trace;
  trace.perturbed = options.perturbation != PerturbationMode::None;

  std::vector<DenseMatrix> phi_prev(order);
  DenseMatrix phi;

  for (std::size_t k = 0; k < options.max_outer; ++k) {
    bool all_converged = true;
    double outer_kkt = 0.0;

    for (std::size_t n = 0; n < order; ++n) {
      ModeVisit visit{k, n, 0.0, 0, {}};
      DenseMatrix B = apply_scooch(model.factors[n], phi_prev[n], model.weights, options.kappa,
                                   options.kappa_tol, &visit.scooched);

      auto t0 = Clock::now();
      const PiMatrix pi = compute_pi(model, tensor, n, threads);
      visit.pi_ms = ms_since(t0);

      for (std::size_t l = 0; l < options.max_inner; ++l) {
        InnerRecord rec{k, n, l, 0.0, 0.0, 0.0, 0.0};
        t0 = Clock::now();
        compute_phi_into(phi, tensor, B, pi, n, options.epsilon, options.strategy, options.policy,
                         options.perturbation, perms.empty() ? nullptr : &perms[n], run);
        rec.phi_ms = ms_since(t0);

        t0 = Clock::now();
        rec.kkt = kkt_violation(B, phi);
        rec.kkt_ms = ms_since(t0);
        ++trace.inner_iterations;

        if (l == 0) {
          outer_kkt = std::max(outer_kkt, rec.kkt);
          if (rec.kkt >= options.kkt_tol) all_converged = false;
        }
        if (rec.kkt < options.kkt_tol) {
          visit.inner.push_back(rec);
          break;
        }
        t0 = Clock::now();
        mu_update_inplace(B, phi);
        rec.mu_ms = ms_since(t0);
        visit.inner.push_back(rec);
      }
      phi_prev[n] = phi;

      auto normalized = normalize(B);
      model.weights = std::move(normalized.lambda);
      model.factors[n] = std::move(normalized.factor);
      trace.visits.push_back(std::move(visit));
    }

    trace.objective.push_back(log_likelihood(tensor, model, options.epsilon));
    trace.kkt.push_back(outer_kkt);
    trace.outer_iterations = k + 1;
    if (all_converged) {
      trace.converged = true;
      break;
    }
  }
  result.model = std::move(model);
  return result;
}

void write_trace_csv(std::ostream& out, const SolverTrace& trace) {
  char buf[160];
  out << "outer,mode,inner,phi_ms,objective,kkt\n";
  for (const auto& visit : trace.visits) {
    const double objective = trace.objective[visit.outer];
    for (const auto& rec : visit.inner) {
      std::snprintf(buf, sizeof(buf), "%zu,%zu,%zu,%.6f,%.17g,%.17g\n", rec.outer, rec.mode,
                    rec.inner, rec.phi_ms, objective, rec.kkt);
      out << buf;
    }
  }
}

}  // namespace cpapr
