#pragma once

#include <set>
#include <string>
#include <vector>

#include "mlnmap/grounder.hpp"
#include "mlnmap/mrf.hpp"

namespace mlnmap {

// Reference implementations for validation. These share no code with the
// relational grounder or the stochastic search: grounding enumerates every
// variable binding directly, activity follows the flip-closure definition,
// and MAP enumerates whole worlds.

struct OracleGrounding {
  ClauseTable table;
  std::uint64_t constant_hard = 0;
  double constant_soft = 0.0;
  int iterations = 1;
  ActiveSet active;
};

OracleGrounding oracle_ground_full(const std::vector<ClausalFormula>& formulas,
                                   const MLNProgram& prog, AtomStore& store);

OracleGrounding oracle_active_closure(const std::vector<ClausalFormula>& formulas,
                                      const MLNProgram& prog, AtomStore& store);

struct OracleMap {
  Cost optimum;                 // includes constant (evidence-decided) cost
  std::vector<Aid> true_atoms;  // one optimal world
  size_t query_atoms = 0;
};

// Exhaustive MAP over the unknown atoms referenced by the table. Refuses more
// than max_query_atoms unknowns.
OracleMap oracle_map(const ClauseTable& table, std::uint64_t constant_hard, double constant_soft,
                     const AtomStore& store, size_t max_query_atoms = 20);

// Canonical text form of a clause set, independent of aid assignment, for
// comparing grounders that ran against different stores.
std::set<std::string> canonical_clause_set(const ClauseTable& table, const AtomStore& store);

}  // namespace mlnmap
