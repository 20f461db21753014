#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "cpapr/phi_strategy.hpp"

namespace cpapr {

inline constexpr std::size_t kMaxTeamTimesVector = 1024;

/// League/team/vector triple controlling kernel work decomposition.
struct PolicyParams {
  std::size_t league_size = 1;
  std::size_t team_size = 1;
  std::size_t vector_size = 1;

  bool valid() const {
    return league_size >= 1 && team_size >= 1 && vector_size >= 1 &&
           team_size * vector_size <= kMaxTeamTimesVector;
  }

  friend auto operator<=>(const PolicyParams&, const PolicyParams&) = default;
};

/// Throws ContractError if the policy is invalid.
void validate(const PolicyParams& policy);

/// Parses "L,T,V".
PolicyParams parse_policy(const std::string& text);
std::string to_string(const PolicyParams& policy);

struct PolicySpace {
  std::vector<std::size_t> leagues;
  std::vector<std::size_t> teams;
  std::vector<std::size_t> vectors;
  // Vector size chosen per (league, team) instead of from `vectors`.
  bool auto_vector = false;
};

/// Vector size used when a space asks for automatic selection: one chunk per
/// worker group, clamped to the team x vector limit.
std::size_t auto_vector_size(std::size_t league, std::size_t team, std::size_t nnz);

/// Valid cross product of the space, ordered lexicographically by
/// (league, team, vector), without duplicates. `nnz` feeds auto_vector.
std::vector<PolicyParams> enumerate_policies(const PolicySpace& space, std::size_t nnz = 0);

/// Cross-product members violating team x vector <= 1024.
std::vector<PolicyParams> skipped_policies(const PolicySpace& space, std::size_t nnz = 0);

struct Chunk {
  std::size_t begin;
  std::size_t end;
  std::size_t group;
};

/// Static tiling of [0, items) into chunks of `width`, dealt round-robin to
/// `groups` logical worker groups, which run on `threads` OS threads
/// (group g on thread g mod threads).
class KernelSchedule {
 public:
  KernelSchedule() = default;
  KernelSchedule(std::size_t items, std::size_t width, std::size_t groups, std::size_t threads);

  std::size_t items() const { return items_; }
  std::size_t width() const { return width_; }
  std::size_t groups() const { return groups_; }
  std::size_t threads() const { return threads_; }
  std::size_t chunk_count() const { return items_ == 0 ? 0 : (items_ + width_ - 1) / width_; }

  Chunk chunk(std::size_t c) const {
    const std::size_t b = c * width_;
    return {b, b + width_ < items_ ? b + width_ : items_, c % groups_};
  }
  std::size_t thread_of_group(std::size_t g) const { return g % threads_; }

  /// Calls f(chunk) for every chunk executed by OS thread `t`, in order.
  template <class F>
  void for_each_chunk_of_thread(std::size_t t, F&& f) const {
    const std::size_t count = chunk_count();
    for (std::size_t g = t; g < groups_; g += threads_)
      for (std::size_t c = g; c < count; c += groups_) f(chunk(c));
  }

 private:
  std::size_t items_ = 0;
  std::size_t width_ = 1;
  std::size_t groups_ = 1;
  std::size_t threads_ = 1;
};

/// ChunkedSorted: min(league, budget) concurrent teams of team_size workers,
/// chunks of V (strategy chunk_size, else vector_size) permutation positions.
/// AtomicPerNonzero: league x team worker groups advancing vector_size
/// nonzeros per step. In both, threads = min(groups, worker_budget).
/// `worker_budget` == 0 means hardware concurrency.
KernelSchedule map_policy_to_kernel(const PolicyParams& policy, const PhiStrategy& strategy,
                                    std::size_t nnz, std::size_t worker_budget = 0);

std::size_t default_worker_budget();

}  // namespace cpapr
