#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mlnmap/store.hpp"

namespace mlnmap {

// Two-tier cost: hard violations dominate, soft cost breaks ties.
struct Cost {
  std::uint64_t hard = 0;
  double soft = 0.0;

  bool operator==(const Cost& o) const { return hard == o.hard && soft == o.soft; }
  bool operator<(const Cost& o) const {
    if (hard != o.hard) return hard < o.hard;
    return soft < o.soft;
  }
  bool operator<=(const Cost& o) const { return *this < o || *this == o; }
  bool is_zero() const { return hard == 0 && soft == 0.0; }
};

inline Cost operator+(Cost a, const Cost& b) {
  a.hard += b.hard;
  a.soft += b.soft;
  return a;
}

std::string to_string(const Cost& c);

struct MrfClause {
  std::uint32_t lits_begin = 0;
  std::uint32_t lits_end = 0;
  Weight weight;
};

using Assignment = std::vector<std::uint8_t>;

// Ground MRF over unknown-truth atoms only. Literals whose truth was fixed by
// evidence are simplified away while building; clauses decided by evidence
// fold into base_cost.
struct Mrf {
  std::vector<Aid> atom_aid;          // atom index -> aid (0 for synthetic test MRFs)
  std::vector<std::int32_t> lit_pool; // +-(atom index + 1)
  std::vector<MrfClause> clauses;
  std::vector<std::uint32_t> adj_off;     // atom -> [begin,end) into adj_
  std::vector<std::uint32_t> adj_clause;  // clause ids, one entry per (atom, clause)
  Cost base_cost;                         // violations fixed by evidence

  size_t atom_count() const { return atom_aid.size(); }
  size_t clause_count() const { return clauses.size(); }
  std::span<const std::int32_t> lits(const MrfClause& c) const {
    return {lit_pool.data() + c.lits_begin, static_cast<size_t>(c.lits_end - c.lits_begin)};
  }
  std::span<const std::int32_t> lits(size_t cid) const { return lits(clauses[cid]); }

  void add_clause(std::span<const std::int32_t> lits, Weight w);
  void finalize();  // builds the adjacency index
};

Mrf build_mrf(const ClauseTable& table, const AtomStore& store);

// Convenience for tests: clauses over atoms 0..n-1 given as signed 1-based lits.
Mrf make_mrf(size_t atoms, const std::vector<std::pair<std::vector<int>, Weight>>& clauses);

bool is_violated(const Mrf& mrf, size_t cid, const Assignment& a);
Cost cost(const Mrf& mrf, const Assignment& a);  // excludes base_cost

struct ComponentIndex {
  std::vector<std::int32_t> atom_comp;
  std::vector<std::int32_t> clause_comp;
  std::int32_t count = 0;
};

// Connected components via union-find; ids are contiguous and ordered by the
// smallest atom index in each component.
ComponentIndex components(const Mrf& mrf);

struct SubMrf {
  Mrf mrf;
  std::vector<std::uint32_t> atom_back;    // sub atom index -> parent atom index
  std::vector<std::uint32_t> clause_back;  // sub clause id -> parent clause id
};

SubMrf project(const Mrf& mrf, const ComponentIndex& idx, std::int32_t comp);
Assignment project_assignment(const SubMrf& sub, const Assignment& full);

}  // namespace mlnmap
