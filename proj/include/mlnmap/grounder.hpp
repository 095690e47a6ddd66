#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mlnmap/parser.hpp"
#include "mlnmap/store.hpp"

namespace mlnmap {

enum class JoinAlgorithm { Hash, NestedLoop };

struct GroundingOptions {
  JoinAlgorithm algorithm = JoinAlgorithm::Hash;
  bool reverse_order = false;  // reverses the join order (output must not change)
  int existential_cap = 64;
  bool explain = false;  // collect per-formula plan text
};

struct CompiledLiteral {
  int pred = -1;
  bool negated = false;
  std::vector<int> var_slot;   // per arg: variable index or -1
  std::vector<Sym> const_arg;  // per arg: constant or -1
};

struct CompiledEquality {
  bool negated = false;
  int lhs_var = -1, rhs_var = -1;
  Sym lhs_const = -1, rhs_const = -1;
};

// One relational query per clausal formula: per-literal scans with truth
// filters, variable-equality join edges, constant selections.
struct GroundingQuery {
  Weight weight;
  int source_id = -1;
  int num_vars = 0;
  std::vector<std::string> var_names;
  std::vector<TypeId> var_types;
  std::vector<CompiledLiteral> literals;  // original clause order
  std::vector<CompiledEquality> equalities;
};

// Validates the formula against declarations: arity and type agreement, every
// variable bound by a non-equality literal, no leftover existential variables.
GroundingQuery compile(const ClausalFormula& f, const MLNProgram& prog);

// Replaces existential literals by disjunctions over the variable's domain
// constants. Domains larger than cap are an error.
ClausalFormula expand_existentials(const ClausalFormula& f, const MLNProgram& prog, int cap);

// Active atoms, addressed by aid.
class ActiveSet {
 public:
  bool is_active(Aid aid) const {
    return aid >= 1 && static_cast<size_t>(aid) <= bits_.size() && bits_[aid - 1];
  }
  void activate(Aid aid) {
    if (static_cast<size_t>(aid) > bits_.size()) bits_.resize(static_cast<size_t>(aid), 0);
    if (!bits_[aid - 1]) {
      bits_[aid - 1] = 1;
      ++count_;
    }
  }
  size_t count() const { return count_; }

 private:
  std::vector<std::uint8_t> bits_;
  size_t count_ = 0;
};

struct GroundStats {
  std::uint64_t bindings = 0;
  std::uint64_t rows = 0;
  std::uint64_t tautologies_dropped = 0;
  std::uint64_t satisfied_dropped = 0;   // bindings killed by a satisfied equality
  std::uint64_t constant_hard = 0;       // clauses fully falsified by evidence
  double constant_soft = 0.0;
  std::string plan;
};

struct ExecuteResult {
  std::vector<std::vector<std::int64_t>> rows;  // signed aids, canonical order
  std::uint64_t constant_hard = 0;
  double constant_soft = 0.0;
};

// Emits exactly the groundings not satisfied by evidence. Rows come out
// sorted by binding tuple so atom creation order (and thus aid assignment)
// does not depend on the join algorithm or on the join order.
// With an ActiveSet, restricts to clauses violable by flipping active atoms
// only (inactive unknown atoms pinned false).
ExecuteResult execute(const GroundingQuery& q, AtomStore& store, const ActiveSet* active,
                      const GroundingOptions& opt, GroundStats* stats = nullptr);

struct GroundingResult {
  ClauseTable table;
  std::uint64_t constant_hard = 0;
  double constant_soft = 0.0;
  std::vector<GroundStats> per_formula;
  int iterations = 1;  // closure passes when lazy
  ActiveSet active;
};

// Full evidence-pruned grounding of every formula (no activity restriction).
GroundingResult ground_full(const std::vector<ClausalFormula>& formulas, const MLNProgram& prog,
                            AtomStore& store, const GroundingOptions& opt = {});

// Lazy grounding: repeat { ground against the ActiveSet; activate unknown
// atoms appearing in new clauses } until fixpoint. The clause table is rebuilt
// each pass so clause weight merging never double-counts across passes.
// Closed-world atoms are never activated.
GroundingResult active_closure(const std::vector<ClausalFormula>& formulas,
                               const MLNProgram& prog, AtomStore& store,
                               const GroundingOptions& opt = {});

}  // namespace mlnmap
