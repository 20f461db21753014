// cpapr_cli: decomposition, PPA, grid search, roofline and microbenchmarks.
//
// Exit codes: 0 success, 1 usage error, 2 input error, 3 runtime failure.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <omp.h>

#include <CLI11.hpp>

#include "cpapr/cpapr_mu.hpp"
#include "cpapr/error.hpp"
#include "cpapr/grid_search.hpp"
#include "cpapr/kruskal_model.hpp"
#include "cpapr/mttkrp.hpp"
#include "cpapr/policy.hpp"
#include "cpapr/ppa.hpp"
#include "cpapr/report.hpp"
#include "cpapr/roofline.hpp"
#include "cpapr/solver_config.hpp"
#include "cpapr/sparse_tensor.hpp"
#include "cpapr/stream_bench.hpp"

namespace fs = std::filesystem;
using namespace cpapr;

namespace {

enum Exit { kOk = 0, kUsage = 1, kInput = 2, kRuntime = 3 };

// Errors in flag values found before any work starts.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> reps;
  std::optional<std::size_t> threads;
  std::optional<std::string> strategy;
  std::optional<std::string> policy;
  std::optional<std::size_t> rank;
  std::optional<std::size_t> chunk_size;
  std::string config;
  std::vector<std::string> sets;
  std::string out;
};

void add_solver_flags(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "RNG seed for the initial model");
  cmd->add_option("--threads", c.threads, "worker thread cap (default: hardware concurrency)");
  cmd->add_option("--strategy", c.strategy, "Phi accumulation: atomic | chunked");
  cmd->add_option("--policy", c.policy, "parallel policy L,T,V");
  cmd->add_option("--rank", c.rank, "CP rank R");
  cmd->add_option("--chunk-size", c.chunk_size, "chunk width V for the chunked strategy");
  cmd->add_option("--config", c.config, "file of key = value solver options");
  cmd->add_option("--set", c.sets, "inline key=value solver option (repeatable)");
}

template <class F>
auto as_usage(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ContractError& e) {
    throw UsageError(e.what());
  } catch (const InputError& e) {
    throw UsageError(e.what());
  }
}

// Config file, then --set pairs, then dedicated flags.
SolverOptions solver_options(const Common& c) {
  SolverOptions o;
  if (!c.config.empty()) o = read_solver_config_file(c.config, o);  // InputError: exit 2
  as_usage([&] {
    for (const auto& kv : c.sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ContractError("--set expects key=value, got '" + kv + "'");
      apply_option(o, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (c.seed) o.seed = *c.seed;
    if (c.threads) o.worker_budget = *c.threads;
    if (c.strategy) o.strategy.variant = parse_phi_variant(*c.strategy);
    if (c.chunk_size) {
      if (*c.chunk_size == 0) throw ContractError("--chunk-size must be at least 1");
      o.strategy.chunk_size = *c.chunk_size;
    }
    if (c.policy) o.policy = parse_policy(*c.policy);
    if (c.rank) o.rank = *c.rank;
    validate(o);
    return 0;
  });
  if (o.worker_budget > 0) omp_set_num_threads(static_cast<int>(o.worker_budget));
  return o;
}

std::vector<std::size_t> parse_list(const std::string& text, const char* flag) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t pos = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(item, &pos);
    } catch (const std::exception&) {
      pos = std::string::npos;
    }
    if (pos != item.size() || v == 0)
      throw UsageError(std::string(flag) + ": bad list entry '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw UsageError(std::string(flag) + ": empty list");
  return out;
}

// Output goes to --out when given, standard output otherwise.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw std::runtime_error("cannot open output '" + path + "'");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }
  void close(const std::string& path) {
    if (file_) {
      file_->close();
      if (!*file_) throw std::runtime_error("failed writing '" + path + "'");
    } else {
      std::cout.flush();
    }
  }

 private:
  std::unique_ptr<std::ofstream> file_;
};

void write_text_file(const std::string& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open output '" + path + "'");
  body(f);
  if (!f) throw std::runtime_error("failed writing '" + path + "'");
}

std::size_t reps_or(const Common& c, std::size_t fallback, std::size_t minimum) {
  const std::size_t r = c.reps.value_or(fallback);
  if (r < minimum)
    throw UsageError("--reps must be at least " + std::to_string(minimum));
  return r;
}

// --- subcommands -----------------------------------------------------------

struct DecomposeArgs {
  std::string input;
  std::string model;
  std::string breakdown;
  std::optional<std::size_t> max_outer;
  std::optional<std::size_t> max_inner;
  std::optional<double> kkt_tol;
};

int run_decompose(const Common& c, const DecomposeArgs& a) {
  SolverOptions o = solver_options(c);
  as_usage([&] {
    if (a.max_outer) apply_option(o, "max_outer", std::to_string(*a.max_outer));
    if (a.max_inner) apply_option(o, "max_inner", std::to_string(*a.max_inner));
    if (a.kkt_tol) o.kkt_tol = *a.kkt_tol;
    validate(o);
    return 0;
  });
  const SparseTensor tensor = read_tns(a.input);

  std::string prefix = a.model;
  if (prefix.empty())
    prefix = c.out.empty() ? fs::path(a.input).stem().string() + ".model"
                           : (fs::path(c.out).parent_path() / fs::path(c.out).stem()).string();

  const SolverResult result = cp_apr_mu(tensor, o);
  save_model(prefix, result.model);
  Output out(c.out);
  write_trace_csv(out.stream(), result.trace);
  out.close(c.out);
  if (!a.breakdown.empty())
    write_text_file(a.breakdown, [&](std::ostream& f) {
      write_breakdown_csv(f, report_kernel_breakdown(result.trace));
    });
  std::fprintf(stderr, "outer=%zu converged=%d objective=%.10g model=%s\n",
               result.trace.outer_iterations, result.trace.converged ? 1 : 0,
               result.trace.objective.empty() ? 0.0 : result.trace.objective.back(),
               prefix.c_str());
  return kOk;
}

struct PpaArgs {
  std::vector<std::string> inputs;
  std::string baseline;
  std::string gnuplot;
};

int run_ppa_cmd(const Common& c, const PpaArgs& a) {
  const SolverOptions o = solver_options(c);
  const std::size_t reps = reps_or(c, 5, 1);
  std::optional<PhiVariant> baseline;
  if (!a.baseline.empty()) baseline = as_usage([&] { return parse_phi_variant(a.baseline); });
  std::vector<NamedTensor> tensors;
  for (const auto& path : a.inputs) tensors.push_back({fs::path(path).stem().string(), read_tns(path)});

  const PpaReport report = run_ppa(tensors, o, o.policy, reps, baseline);
  Output out(c.out);
  write_ppa_csv(out.stream(), report);
  out.close(c.out);
  if (!a.gnuplot.empty())
    write_text_file(a.gnuplot, [&](std::ostream& f) {
      write_ppa_gnuplot(f, c.out.empty() ? "ppa.csv" : c.out);
    });
  return kOk;
}

struct GridArgs {
  std::string input;
  std::string leagues = "1";
  std::string teams = "1";
  std::string vectors = "128";
  bool auto_vector = false;
  std::string baseline;
  bool full_solver = false;
  std::string heatmap;
};

int run_grid(const Common& c, const GridArgs& a) {
  const SolverOptions o = solver_options(c);
  const std::size_t reps = reps_or(c, 3, 1);
  PolicySpace space;
  space.leagues = parse_list(a.leagues, "--policy-league");
  space.teams = parse_list(a.teams, "--policy-team");
  space.vectors = parse_list(a.vectors, "--policy-vector");
  space.auto_vector = a.auto_vector;
  const PolicyParams baseline = as_usage([&] {
    const PolicyParams p = a.baseline.empty() ? o.policy : parse_policy(a.baseline);
    validate(p);
    return p;
  });
  const SparseTensor tensor = read_tns(a.input);

  const GridResult result = grid_search(tensor, o, space, baseline, reps, a.full_solver);
  Output out(c.out);
  write_grid_csv(out.stream(), result);
  out.close(c.out);
  if (!a.heatmap.empty())
    write_text_file(a.heatmap, [&](std::ostream& f) { write_grid_heatmap(f, result); });
  return kOk;
}

struct RooflineArgs {
  std::string machine;
  std::string variants = "base,chunked";
  bool quoted = false;
  std::string gnuplot;
};

int run_roofline(const Common& c, const RooflineArgs& a) {
  const std::int64_t rank = static_cast<std::int64_t>(c.rank.value_or(10));
  const std::int64_t chunk = static_cast<std::int64_t>(c.chunk_size.value_or(128));
  if (rank < 1 || chunk < 1) throw UsageError("--rank and --chunk-size must be at least 1");
  std::vector<KernelCostModel> models;
  std::stringstream ss(a.variants);
  std::string v;
  while (std::getline(ss, v, ',')) {
    if (v == "base" || v == "atomic" || v == "gpu")
      models.push_back({CostVariant::BaseGpuStyle, rank, 1, 8});
    else if (v == "chunked" || v == "cpu")
      models.push_back({CostVariant::CpuChunked, rank, chunk, 8});
    else
      throw UsageError("--variants: unknown cost model '" + v + "'");
  }
  const MachineSpec machine = resolve_machine_spec(a.machine);

  RooflineOptions opts;
  opts.quoted_markers = a.quoted;
  Output out(c.out);
  emit_roofline(out.stream(), machine, models, opts);
  out.close(c.out);
  if (!a.gnuplot.empty())
    write_text_file(a.gnuplot, [&](std::ostream& f) {
      write_roofline_gnuplot(f, machine, c.out.empty() ? "roofline.csv" : c.out);
    });
  return kOk;
}

struct StreamArgs {
  std::size_t length = 10'000'000;
  std::string kernels = "copy,scale,add,triad";
  double scalar = 3.0;
  std::string machine;
};

int run_stream_cmd(const Common& c, const StreamArgs& a) {
  StreamOptions opts;
  opts.length = a.length;
  opts.reps = reps_or(c, 10, 2);
  opts.scalar = a.scalar;
  opts.threads = static_cast<int>(c.threads.value_or(0));
  if (opts.length == 0) throw UsageError("--length must be positive");
  opts.kernels.clear();
  std::stringstream ss(a.kernels);
  std::string k;
  while (std::getline(ss, k, ','))
    opts.kernels.push_back(as_usage([&] { return parse_stream_kernel(k); }));
  std::optional<MachineSpec> machine;
  if (!a.machine.empty()) machine = resolve_machine_spec(a.machine);

  auto results = run_stream(opts);
  if (machine) attach_peak(results, *machine);
  Output out(c.out);
  write_bandwidth_csv(out.stream(), results);
  out.close(c.out);
  for (const auto& r : results)
    if (!r.validated) throw std::runtime_error("STREAM " + r.kernel + " failed validation");
  return kOk;
}

struct MttkrpArgs {
  std::string input;
  std::string machine;
};

int run_mttkrp_cmd(const Common& c, const MttkrpArgs& a) {
  const SolverOptions o = solver_options(c);
  MttkrpBenchOptions b;
  b.rank = c.rank.value_or(16);
  b.reps = reps_or(c, 5, 2);
  b.seed = o.seed;
  b.run.strategy = c.strategy ? o.strategy : PhiStrategy{PhiVariant::AtomicPerNonzero, o.strategy.chunk_size};
  b.run.policy = o.policy;
  b.run.worker_budget = o.worker_budget;
  b.label = fs::path(a.input).stem().string();
  std::optional<MachineSpec> machine;
  if (!a.machine.empty()) machine = resolve_machine_spec(a.machine);
  const SparseTensor tensor = read_tns(a.input);

  std::vector<BandwidthResult> results{mttkrp_bandwidth(tensor, b)};
  if (machine) attach_peak(results, *machine);
  Output out(c.out);
  write_bandwidth_csv(out.stream(), results);
  out.close(c.out);
  if (!results.front().validated) throw std::runtime_error("MTTKRP result failed validation");
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse Poisson tensor decomposition (CP-APR MU) and kernel analysis tools"};
  app.require_subcommand(1, 1);
  app.set_help_all_flag("--help-all", "expand help for every subcommand");

  Common common;
  std::function<int()> action;

  auto* dec = app.add_subcommand("decompose", "fit a CP-APR model to a .tns tensor");
  DecomposeArgs dargs;
  add_solver_flags(dec, common);
  dec->add_option("--input", dargs.input, "input .tns file")->required();
  dec->add_option("--model", dargs.model, "output prefix for .lambda and .factorN.tns files");
  dec->add_option("--breakdown", dargs.breakdown, "write the kernel time breakdown CSV here");
  dec->add_option("--max-outer", dargs.max_outer, "outer iteration limit");
  dec->add_option("--max-inner", dargs.max_inner, "inner iteration limit");
  dec->add_option("--kkt-tol", dargs.kkt_tol, "KKT convergence tolerance");
  dec->add_option("--out", common.out, "trace CSV (default stdout)");
  dec->callback([&] { action = [&] { return run_decompose(common, dargs); }; });

  auto* ppa = app.add_subcommand("ppa", "pressure point analysis of the Phi kernel");
  PpaArgs pargs;
  add_solver_flags(ppa, common);
  ppa->add_option("--input", pargs.inputs, "input .tns files")->required();
  ppa->add_option("--reps", common.reps, "timed repetitions per kernel");
  ppa->add_option("--baseline", pargs.baseline, "unperturbed variant speedups refer to");
  ppa->add_option("--gnuplot", pargs.gnuplot, "write a gnuplot script here");
  ppa->add_option("--out", common.out, "CSV output (default stdout)");
  ppa->callback([&] { action = [&] { return run_ppa_cmd(common, pargs); }; });

  auto* grid = app.add_subcommand("gridsearch", "time the Phi kernel over a policy grid");
  GridArgs gargs;
  add_solver_flags(grid, common);
  grid->add_option("--input", gargs.input, "input .tns file")->required();
  grid->add_option("--policy-league", gargs.leagues, "league sizes, comma separated");
  grid->add_option("--policy-team", gargs.teams, "team sizes, comma separated");
  grid->add_option("--policy-vector", gargs.vectors, "vector sizes, comma separated");
  grid->add_flag("--auto-vector", gargs.auto_vector, "derive the vector size from nnz");
  grid->add_option("--baseline", gargs.baseline, "baseline policy L,T,V (default --policy)");
  grid->add_flag("--full-solver", gargs.full_solver, "also time whole solver runs");
  grid->add_option("--reps", common.reps, "timed repetitions per policy");
  grid->add_option("--heatmap", gargs.heatmap, "write gnuplot heatmap data here");
  grid->add_option("--out", common.out, "CSV output (default stdout)");
  grid->callback([&] { action = [&] { return run_grid(common, gargs); }; });

  auto* roof = app.add_subcommand("roofline", "emit roofline curve and Phi kernel markers");
  RooflineArgs rargs;
  roof->add_option("--machine", rargs.machine, "machine spec name or JSON path")->required();
  roof->add_option("--rank", common.rank, "CP rank R (default 10)");
  roof->add_option("--chunk-size", common.chunk_size, "chunk width V (default 128)");
  roof->add_option("--variants", rargs.variants, "cost models: base,chunked");
  roof->add_flag("--quoted", rargs.quoted, "also mark the published intensities");
  roof->add_option("--gnuplot", rargs.gnuplot, "write a gnuplot script here");
  roof->add_option("--out", common.out, "CSV output (default stdout)");
  roof->callback([&] { action = [&] { return run_roofline(common, rargs); }; });

  auto* stream = app.add_subcommand("bench-stream", "STREAM copy/scale/add/triad bandwidth");
  StreamArgs sargs;
  stream->add_option("--length", sargs.length, "array length");
  stream->add_option("--kernels", sargs.kernels, "kernels, comma separated");
  stream->add_option("--scalar", sargs.scalar, "scale factor s");
  stream->add_option("--reps", common.reps, "repetitions (first is a warm-up)");
  stream->add_option("--threads", common.threads, "worker thread cap");
  stream->add_option("--machine", sargs.machine, "machine spec for percent of peak");
  stream->add_option("--out", common.out, "CSV output (default stdout)");
  stream->callback([&] { action = [&] { return run_stream_cmd(common, sargs); }; });

  auto* mk = app.add_subcommand("bench-mttkrp", "MTTKRP effective bandwidth");
  MttkrpArgs margs;
  add_solver_flags(mk, common);
  mk->add_option("--input", margs.input, "input .tns file")->required();
  mk->add_option("--reps", common.reps, "repetitions (first is a warm-up)");
  mk->add_option("--machine", margs.machine, "machine spec for percent of peak");
  mk->add_option("--out", common.out, "CSV output (default stdout)");
  mk->callback([&] { action = [&] { return run_mttkrp_cmd(common, margs); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "cpapr_cli: %s\n", e.what());
    return kUsage;
  }

  try {
    return action();
  } catch (const UsageError& e) {
    std::fprintf(stderr, "cpapr_cli: usage error: %s\n", e.what());
    return kUsage;
  } catch (const InputError& e) {
    std::fprintf(stderr, "cpapr_cli: input error: %s\n", e.what());
    return kInput;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "cpapr_cli: error: %s\n", e.what());
    return kRuntime;
  }
}
