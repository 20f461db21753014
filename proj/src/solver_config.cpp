#include "cpapr/solver_config.hpp"

#include <fstream>
#include <istream>

#include "cpapr/error.hpp"

namespace cpapr {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::size_t to_size(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  unsigned long long out = 0;
  try {
    if (!v.empty() && v.front() == '-') throw std::invalid_argument(v);
    out = std::stoull(v, &pos);
  } catch (const std::exception&) {
    throw InputError("option '" + key + "': expected a nonnegative integer, got '" + v + "'");
  }
  if (pos != v.size()) throw InputError("option '" + key + "': trailing characters in '" + v + "'");
  return static_cast<std::size_t>(out);
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double out = 0;
  try {
    out = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw InputError("option '" + key + "': expected a number, got '" + v + "'");
  }
  if (pos != v.size()) throw InputError("option '" + key + "': trailing characters in '" + v + "'");
  return out;
}

}  // namespace

void apply_option(SolverOptions& o, const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  try {
    if (key == "rank") o.rank = to_size(key, v);
    else if (key == "max_outer") o.max_outer = to_size(key, v);
    else if (key == "max_inner") o.max_inner = to_size(key, v);
    else if (key == "epsilon") o.epsilon = to_double(key, v);
    else if (key == "kappa") o.kappa = to_double(key, v);
    else if (key == "kappa_tol") o.kappa_tol = to_double(key, v);
    else if (key == "kkt_tol") o.kkt_tol = to_double(key, v);
    else if (key == "seed") o.seed = to_size(key, v);
    else if (key == "strategy") o.strategy.variant = parse_phi_variant(v);
    else if (key == "chunk_size") o.strategy.chunk_size = to_size(key, v);
    else if (key == "perturbation") o.perturbation = parse_perturbation(v);
    else if (key == "policy") o.policy = parse_policy(v);
    else if (key == "threads") o.worker_budget = to_size(key, v);
    else throw InputError("unknown option '" + key + "'");
  } catch (const ContractError& e) {
    throw InputError(e.what());
  }
}

SolverOptions read_solver_config(std::istream& in, SolverOptions base) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw InputError("config line " + std::to_string(line_no) + ": expected key=value");
    apply_option(base, trim(t.substr(0, eq)), t.substr(eq + 1));
  }
  return base;
}

SolverOptions read_solver_config_file(const std::string& path, SolverOptions base) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file '" + path + "'");
  return read_solver_config(in, std::move(base));
}

}  // namespace cpapr
