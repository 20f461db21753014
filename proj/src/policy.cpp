#include "cpapr/policy.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include <omp.h>

#include "cpapr/error.hpp"

namespace cpapr {

PhiVariant parse_phi_variant(const std::string& name) {
  if (name == "atomic" || name == "gpu") return PhiVariant::AtomicPerNonzero;
  if (name == "chunked" || name == "cpu") return PhiVariant::ChunkedSorted;
  throw ContractError("unknown strategy '" + name + "' (expected atomic|chunked)");
}

std::string to_string(PhiVariant variant) {
  return variant == PhiVariant::AtomicPerNonzero ? "atomic" : "chunked";
}

PerturbationMode parse_perturbation(const std::string& name) {
  if (name == "none") return PerturbationMode::None;
  if (name == "no-atomics") return PerturbationMode::NoAtomics;
  if (name == "fixed-row") return PerturbationMode::FixedRow;
  if (name == "both") return PerturbationMode::Both;
  throw ContractError("unknown perturbation '" + name + "'");
}

std::string to_string(PerturbationMode mode) {
  switch (mode) {
    case PerturbationMode::None: return "none";
    case PerturbationMode::NoAtomics: return "no-atomics";
    case PerturbationMode::FixedRow: return "fixed-row";
    case PerturbationMode::Both: return "both";
  }
  return "?";
}

void validate(const PolicyParams& policy) {
  if (policy.league_size < 1 || policy.team_size < 1 || policy.vector_size < 1)
    throw ContractError("policy sizes must be at least 1: " + to_string(policy));
  if (policy.team_size * policy.vector_size > kMaxTeamTimesVector)
    throw ContractError("team size x vector size exceeds 1024: " + to_string(policy));
}

PolicyParams parse_policy(const std::string& text) {
  std::vector<std::size_t> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t pos = 0;
    long long v = 0;
    try {
      v = std::stoll(item, &pos);
    } catch (const std::exception&) {
      throw ContractError("invalid policy triple '" + text + "'");
    }
    if (pos != item.size() || v < 1) throw ContractError("invalid policy triple '" + text + "'");
    parts.push_back(static_cast<std::size_t>(v));
  }
  if (parts.size() != 3) throw ContractError("policy must be L,T,V: '" + text + "'");
  PolicyParams p{parts[0], parts[1], parts[2]};
  validate(p);
  return p;
}

std::string to_string(const PolicyParams& p) {
  return std::to_string(p.league_size) + "," + std::to_string(p.team_size) + "," +
         std::to_string(p.vector_size);
}

std::size_t auto_vector_size(std::size_t league, std::size_t team, std::size_t nnz) {
  const std::size_t groups = std::max<std::size_t>(1, league * team);
  const std::size_t per_group = std::max<std::size_t>(1, (nnz + groups - 1) / groups);
  return std::min(per_group, std::max<std::size_t>(1, kMaxTeamTimesVector / team));
}

namespace {

std::set<PolicyParams> cross_product(const PolicySpace& space, std::size_t nnz) {
  if (space.leagues.empty() || space.teams.empty() || (!space.auto_vector && space.vectors.empty()))
    throw ContractError("policy space has an empty candidate list");
  std::set<PolicyParams> all;
  for (auto l : space.leagues)
    for (auto t : space.teams) {
      if (space.auto_vector) {
        all.insert({l, t, auto_vector_size(l, t, nnz)});
        continue;
      }
      for (auto v : space.vectors) all.insert({l, t, v});
    }
  return all;
}

}  // namespace

std::vector<PolicyParams> enumerate_policies(const PolicySpace& space, std::size_t nnz) {
  std::vector<PolicyParams> out;
  for (const auto& p : cross_product(space, nnz))
    if (p.valid()) out.push_back(p);
  return out;
}

std::vector<PolicyParams> skipped_policies(const PolicySpace& space, std::size_t nnz) {
  std::vector<PolicyParams> out;
  for (const auto& p : cross_product(space, nnz))
    if (!p.valid()) out.push_back(p);
  return out;
}

KernelSchedule::KernelSchedule(std::size_t items, std::size_t width, std::size_t groups,
                               std::size_t threads)
    : items_(items),
      width_(std::max<std::size_t>(1, width)),
      groups_(std::max<std::size_t>(1, groups)),
      threads_(std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(1, groups))) {}

std::size_t default_worker_budget() {
  return static_cast<std::size_t>(std::max(1, omp_get_max_threads()));
}

KernelSchedule map_policy_to_kernel(const PolicyParams& policy, const PhiStrategy& strategy,
                                    std::size_t nnz, std::size_t worker_budget) {
  validate(policy);
  const std::size_t budget = worker_budget == 0 ? default_worker_budget() : worker_budget;
  if (strategy.variant == PhiVariant::ChunkedSorted) {
    const std::size_t v = strategy.chunk_size.value_or(policy.vector_size);
    if (v == 0) throw ContractError("chunk size V must be at least 1");
    const std::size_t teams = std::min(policy.league_size, budget);
    const std::size_t groups = teams * policy.team_size;
    return KernelSchedule(nnz, v, groups, std::min(groups, budget));
  }
  const std::size_t groups = policy.league_size * policy.team_size;
  return KernelSchedule(nnz, policy.vector_size, groups, std::min(groups, budget));
}

}  // namespace cpapr
