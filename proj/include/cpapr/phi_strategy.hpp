#pragma once

#include <cstddef>
#include <optional>
#include <string>

namespace cpapr {

/// How concurrent updates to the same output row are made safe.
enum class PhiVariant {
  // One nonzero per work item, every row update is an atomic add.
  AtomicPerNonzero,
  // Contiguous chunks of V nonzeros in permutation order; rows wholly owned by
  // a chunk are flushed without atomics, rows shared at chunk borders with them.
  ChunkedSorted,
};

struct PhiStrategy {
  PhiVariant variant = PhiVariant::ChunkedSorted;
  // V for ChunkedSorted. Empty: take V from the policy's vector size.
  std::optional<std::size_t> chunk_size;
};

/// "atomic" / "chunked"; throws ContractError otherwise.
PhiVariant parse_phi_variant(const std::string& name);
std::string to_string(PhiVariant variant);

/// PPA perturbation applied inside a kernel run.
enum class PerturbationMode { None, NoAtomics, FixedRow, Both };

inline constexpr PerturbationMode kAllPerturbations[] = {
    PerturbationMode::None, PerturbationMode::NoAtomics, PerturbationMode::FixedRow,
    PerturbationMode::Both};

/// "none", "no-atomics", "fixed-row", "both".
PerturbationMode parse_perturbation(const std::string& name);
std::string to_string(PerturbationMode mode);

inline bool drops_atomics(PerturbationMode m) {
  return m == PerturbationMode::NoAtomics || m == PerturbationMode::Both;
}
inline bool fixes_rows(PerturbationMode m) {
  return m == PerturbationMode::FixedRow || m == PerturbationMode::Both;
}

}  // namespace cpapr
