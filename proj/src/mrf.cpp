#include "mlnmap/mrf.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

namespace mlnmap {

std::string to_string(const Cost& c) {
  return "(hard " + std::to_string(c.hard) + ", soft " + std::to_string(c.soft) + ")";
}

void Mrf::add_clause(std::span<const std::int32_t> lits, Weight w) {
  MrfClause c;
  c.lits_begin = static_cast<std::uint32_t>(lit_pool.size());
  lit_pool.insert(lit_pool.end(), lits.begin(), lits.end());
  c.lits_end = static_cast<std::uint32_t>(lit_pool.size());
  c.weight = w;
  clauses.push_back(c);
}

void Mrf::finalize() {
  size_t n = atom_count();
  std::vector<std::uint32_t> deg(n, 0);
  for (const auto& c : clauses)
    for (std::int32_t lit : lits(c)) ++deg[static_cast<size_t>(std::abs(lit)) - 1];
  adj_off.assign(n + 1, 0);
  for (size_t i = 0; i < n; ++i) adj_off[i + 1] = adj_off[i] + deg[i];
  adj_clause.resize(adj_off[n]);
  std::vector<std::uint32_t> cursor(adj_off.begin(), adj_off.end() - 1);
  for (size_t cid = 0; cid < clauses.size(); ++cid)
    for (std::int32_t lit : lits(cid))
      adj_clause[cursor[static_cast<size_t>(std::abs(lit)) - 1]++] = static_cast<std::uint32_t>(cid);
}

Mrf build_mrf(const ClauseTable& table, const AtomStore& store) {
  Mrf mrf;
  std::unordered_map<Aid, std::uint32_t> atom_index;
  auto index_of = [&](Aid aid) {
    auto it = atom_index.find(aid);
    if (it != atom_index.end()) return it->second;
    std::uint32_t idx = static_cast<std::uint32_t>(mrf.atom_aid.size());
    mrf.atom_aid.push_back(aid);
    atom_index.emplace(aid, idx);
    return idx;
  };

  std::vector<std::int32_t> reduced;
  for (const auto& row : table.rows()) {
    reduced.clear();
    bool decided_true = false;
    for (std::int64_t lit : row.lits) {
      Aid aid = lit > 0 ? lit : -lit;
      TruthValue t = store.truth(aid);
      if (t == TruthValue::Unknown) {
        std::uint32_t idx = index_of(aid);
        reduced.push_back(lit > 0 ? static_cast<std::int32_t>(idx + 1)
                                  : -static_cast<std::int32_t>(idx + 1));
        continue;
      }
      bool lit_true = (t == TruthValue::True) == (lit > 0);
      if (lit_true) {
        decided_true = true;
        break;
      }
      // Literal fixed false: drops out of the disjunction.
    }
    if (decided_true) {
      // Cannot arise from the evidence-pruned grounder; tolerated for hand-built
      // tables. A permanently true clause only costs when its weight is negative.
      if (!row.weight.positive_semantics()) {
        if (row.weight.is_hard()) mrf.base_cost.hard += 1;
        else mrf.base_cost.soft += std::abs(row.weight.value);
      }
      continue;
    }
    if (reduced.empty()) {
      // Every literal fixed false: positive-weight clauses are violated forever.
      if (row.weight.positive_semantics()) {
        if (row.weight.is_hard()) mrf.base_cost.hard += 1;
        else mrf.base_cost.soft += std::abs(row.weight.value);
      }
      continue;
    }
    mrf.add_clause(reduced, row.weight);
  }
  mrf.finalize();
  return mrf;
}

Mrf make_mrf(size_t atoms, const std::vector<std::pair<std::vector<int>, Weight>>& clauses) {
  Mrf mrf;
  mrf.atom_aid.assign(atoms, 0);
  for (const auto& [lits, w] : clauses) {
    std::vector<std::int32_t> ls(lits.begin(), lits.end());
    mrf.add_clause(ls, w);
  }
  mrf.finalize();
  return mrf;
}

bool is_violated(const Mrf& mrf, size_t cid, const Assignment& a) {
  const MrfClause& c = mrf.clauses[cid];
  bool any_true = false;
  for (std::int32_t lit : mrf.lits(c)) {
    size_t atom = static_cast<size_t>(std::abs(lit)) - 1;
    if ((a[atom] != 0) == (lit > 0)) {
      any_true = true;
      break;
    }
  }
  if (c.weight.tier == WeightTier::Soft && c.weight.value == 0.0) return false;
  return c.weight.positive_semantics() ? !any_true : any_true;
}

Cost cost(const Mrf& mrf, const Assignment& a) {
  Cost total;
  for (size_t cid = 0; cid < mrf.clauses.size(); ++cid) {
    if (!is_violated(mrf, cid, a)) continue;
    const Weight& w = mrf.clauses[cid].weight;
    if (w.is_hard()) total.hard += 1;
    else total.soft += std::abs(w.value);
  }
  return total;
}

namespace {

struct UnionFind {
  std::vector<std::int32_t> parent;
  explicit UnionFind(size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::int32_t find(std::int32_t x) {
    while (parent[static_cast<size_t>(x)] != x) {
      parent[static_cast<size_t>(x)] = parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
      x = parent[static_cast<size_t>(x)];
    }
    return x;
  }
  void unite(std::int32_t a, std::int32_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[static_cast<size_t>(std::max(a, b))] = std::min(a, b);
  }
};

}  // namespace

ComponentIndex components(const Mrf& mrf) {
  UnionFind uf(mrf.atom_count());
  for (size_t cid = 0; cid < mrf.clauses.size(); ++cid) {
    auto lits = mrf.lits(cid);
    for (size_t i = 1; i < lits.size(); ++i)
      uf.unite(std::abs(lits[0]) - 1, std::abs(lits[i]) - 1);
  }
  ComponentIndex idx;
  idx.atom_comp.assign(mrf.atom_count(), -1);
  std::int32_t next = 0;
  for (size_t i = 0; i < mrf.atom_count(); ++i) {
    std::int32_t root = uf.find(static_cast<std::int32_t>(i));
    if (idx.atom_comp[static_cast<size_t>(root)] < 0)
      idx.atom_comp[static_cast<size_t>(root)] = next++;
    idx.atom_comp[i] = idx.atom_comp[static_cast<size_t>(root)];
  }
  idx.count = next;
  idx.clause_comp.resize(mrf.clause_count());
  for (size_t cid = 0; cid < mrf.clause_count(); ++cid)
    idx.clause_comp[cid] =
        idx.atom_comp[static_cast<size_t>(std::abs(mrf.lits(cid)[0])) - 1];
  return idx;
}

SubMrf project(const Mrf& mrf, const ComponentIndex& idx, std::int32_t comp) {
  SubMrf sub;
  std::vector<std::int32_t> local(mrf.atom_count(), -1);
  for (size_t i = 0; i < mrf.atom_count(); ++i) {
    if (idx.atom_comp[i] != comp) continue;
    local[i] = static_cast<std::int32_t>(sub.atom_back.size());
    sub.atom_back.push_back(static_cast<std::uint32_t>(i));
    sub.mrf.atom_aid.push_back(mrf.atom_aid[i]);
  }
  std::vector<std::int32_t> lits;
  for (size_t cid = 0; cid < mrf.clause_count(); ++cid) {
    if (idx.clause_comp[cid] != comp) continue;
    lits.clear();
    for (std::int32_t lit : mrf.lits(cid)) {
      std::int32_t l = local[static_cast<size_t>(std::abs(lit)) - 1] + 1;
      lits.push_back(lit > 0 ? l : -l);
    }
    sub.mrf.add_clause(lits, mrf.clauses[cid].weight);
    sub.clause_back.push_back(static_cast<std::uint32_t>(cid));
  }
  sub.mrf.base_cost = Cost{};
  sub.mrf.finalize();
  return sub;
}

Assignment project_assignment(const SubMrf& sub, const Assignment& full) {
  Assignment a(sub.atom_back.size());
  for (size_t i = 0; i < sub.atom_back.size(); ++i) a[i] = full[sub.atom_back[i]];
  return a;
}

}  // namespace mlnmap
