#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "mlnmap/mrf.hpp"

namespace mlnmap {

// Documented estimate used to translate a byte budget into size units
// (one unit = one atom or one literal).
inline constexpr std::uint64_t kBytesPerSizeUnit = 64;

inline constexpr std::uint64_t kNoBound = std::numeric_limits<std::uint64_t>::max();

struct Partition {
  std::vector<std::uint32_t> atoms;    // ascending parent atom index
  std::vector<std::uint32_t> clauses;  // accepted (intra-partition) clauses, ascending
  std::uint64_t size_units = 0;        // atoms + literals of accepted clauses
};

struct CutSet {
  std::vector<std::uint32_t> clauses;
  double soft_weight = 0.0;
  std::uint64_t hard_count = 0;
};

struct PartitionResult {
  std::vector<Partition> parts;
  CutSet cut;
  std::vector<std::int32_t> atom_part;
  std::vector<std::int32_t> clause_owner;  // cut clauses get the partition of
                                           // their first atom (ascending index)
  bool oversize = false;  // some single clause exceeded beta and was force-merged
};

// Kruskal-style agglomeration: clauses in descending |weight| (hard first,
// ties by ascending clause id) merge their atoms' partitions when the merged
// size stays within beta; refused clauses form the cut set. beta = kNoBound
// reduces to connected components. A single clause larger than beta becomes
// its own partition (with the oversize flag raised) rather than an error.
PartitionResult partition(const Mrf& mrf, std::uint64_t beta);

// First-fit-decreasing by size; every batch stays within budget.
// Throws BudgetError when some partition alone exceeds the budget.
std::vector<std::vector<std::uint32_t>> pack_batches(const std::vector<Partition>& parts,
                                                     std::uint64_t budget);

// Expected gain of partition-aware search: 2^(n_hat/3) - T * cut/total.
double estimate_gain(double n_hat, double total_flips, std::uint64_t cut_clauses,
                     std::uint64_t total_clauses);

struct RDiagnostic {
  double r = 0.0;
  double numerator = 0.0;    // min over components/optima of v(x) * beta(x)
  double denominator = 0.0;  // max over components/near-optima of v(x) * alpha(x)
  bool defined = false;
};

// Exhaustive transition-matrix diagnostic over small components (<= max_atoms
// each): alpha sums transition mass into optimal states, beta into non-optimal
// states one flip away from an optimum.
RDiagnostic compute_r(std::span<const Mrf* const> comps, double noise = 0.5,
                      size_t max_atoms = 12);

}  // namespace mlnmap
