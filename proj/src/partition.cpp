#include "mlnmap/partition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mlnmap {

namespace {

struct UnionFind {
  std::vector<std::uint32_t> parent;
  explicit UnionFind(size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0u);
  }
  std::uint32_t find(std::uint32_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
};

}  // namespace

PartitionResult partition(const Mrf& mrf, std::uint64_t beta) {
  size_t n = mrf.atom_count();
  size_t m = mrf.clause_count();

  // Heavier clauses get merged first so cutting, when forced, prefers the
  // cheapest clauses. Hard tiers sort ahead of every soft weight.
  std::vector<std::uint32_t> order(m);
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    double wa = mrf.clauses[a].weight.magnitude();
    double wb = mrf.clauses[b].weight.magnitude();
    if (wa != wb) return wa > wb;
    return a < b;
  });

  UnionFind uf(n);
  std::vector<std::uint64_t> size_units(n, 1);  // one unit per atom
  std::vector<bool> accepted(m, false);
  bool oversize = false;

  for (std::uint32_t cid : order) {
    auto lits = mrf.lits(cid);
    std::vector<std::uint32_t> roots;
    std::vector<std::uint32_t> atoms;
    for (std::int32_t lit : lits) {
      std::uint32_t a = static_cast<std::uint32_t>((lit > 0 ? lit : -lit) - 1);
      if (std::find(atoms.begin(), atoms.end(), a) == atoms.end()) atoms.push_back(a);
      std::uint32_t r = uf.find(a);
      if (std::find(roots.begin(), roots.end(), r) == roots.end()) roots.push_back(r);
    }
    std::uint64_t merged = lits.size();
    for (std::uint32_t r : roots) merged += size_units[r];
    std::uint64_t own = atoms.size() + lits.size();  // minimal footprint of the clause
    if (beta != kNoBound && merged > beta) {
      if (own > beta) {
        // Even alone this clause cannot fit; it must live somewhere, so it
        // is merged anyway and the result is flagged.
        oversize = true;
      } else {
        continue;  // refused: becomes a cut clause
      }
    }
    accepted[cid] = true;
    std::uint32_t target = roots[0];
    for (size_t i = 1; i < roots.size(); ++i) uf.parent[roots[i]] = target;
    size_units[target] = merged;
  }

  PartitionResult out;
  out.oversize = oversize;
  out.atom_part.assign(n, 0);
  std::vector<std::int32_t> part_of_root(n, -1);
  for (size_t a = 0; a < n; ++a) {
    std::uint32_t r = uf.find(static_cast<std::uint32_t>(a));
    if (part_of_root[r] < 0) {
      part_of_root[r] = static_cast<std::int32_t>(out.parts.size());
      out.parts.emplace_back();
      out.parts.back().size_units = size_units[r];
    }
    std::uint32_t p = static_cast<std::uint32_t>(part_of_root[r]);
    out.atom_part[a] = p;
    out.parts[p].atoms.push_back(static_cast<std::uint32_t>(a));
  }

  out.clause_owner.assign(m, 0);
  for (std::uint32_t cid = 0; cid < m; ++cid) {
    auto lits = mrf.lits(cid);
    std::uint32_t first_atom = static_cast<std::uint32_t>(n);
    for (std::int32_t lit : lits) {
      std::uint32_t a = static_cast<std::uint32_t>((lit > 0 ? lit : -lit) - 1);
      first_atom = std::min(first_atom, a);
    }
    std::uint32_t owner = out.atom_part[first_atom];
    out.clause_owner[cid] = owner;
    if (accepted[cid]) {
      out.parts[owner].clauses.push_back(cid);
    } else {
      out.cut.clauses.push_back(cid);
      if (mrf.clauses[cid].weight.is_hard()) out.cut.hard_count += 1;
      else out.cut.soft_weight += std::abs(mrf.clauses[cid].weight.value);
    }
  }
  return out;
}

std::vector<std::vector<std::uint32_t>> pack_batches(const std::vector<Partition>& parts,
                                                     std::uint64_t budget) {
  std::vector<std::uint32_t> order(parts.size());
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return parts[a].size_units > parts[b].size_units;
  });

  std::vector<std::vector<std::uint32_t>> bins;
  std::vector<std::uint64_t> load;
  for (std::uint32_t p : order) {
    std::uint64_t s = parts[p].size_units;
    if (s > budget)
      throw BudgetError("partition of " + std::to_string(s) +
                        " units exceeds the batch budget of " + std::to_string(budget));
    bool placed = false;
    for (size_t b = 0; b < bins.size(); ++b)
      if (load[b] + s <= budget) {
        bins[b].push_back(p);
        load[b] += s;
        placed = true;
        break;
      }
    if (!placed) {
      bins.push_back({p});
      load.push_back(s);
    }
  }
  return bins;
}

double estimate_gain(double n_hat, double total_flips, std::uint64_t cut_clauses,
                     std::uint64_t total_clauses) {
  double split = std::pow(2.0, n_hat / 3.0);
  double penalty = total_clauses == 0
                       ? 0.0
                       : total_flips * (static_cast<double>(cut_clauses) /
                                        static_cast<double>(total_clauses));
  return split - penalty;
}

namespace {

Cost state_cost(const Mrf& mrf, std::uint64_t mask) {
  Assignment a(mrf.atom_count());
  for (size_t i = 0; i < a.size(); ++i) a[i] = (mask >> i) & 1;
  return cost(mrf, a);
}

int violated_count(const Mrf& mrf, std::uint64_t mask) {
  Assignment a(mrf.atom_count());
  for (size_t i = 0; i < a.size(); ++i) a[i] = (mask >> i) & 1;
  int v = 0;
  for (std::uint32_t c = 0; c < mrf.clause_count(); ++c)
    if (is_violated(mrf, c, a)) ++v;
  return v;
}

// One-step transition distribution of the local search from `mask`,
// restricted to the states it can actually reach (Hamming distance one).
std::vector<std::pair<std::uint64_t, double>> transitions(const Mrf& mrf, std::uint64_t mask,
                                                          double noise) {
  Assignment a(mrf.atom_count());
  for (size_t i = 0; i < a.size(); ++i) a[i] = (mask >> i) & 1;
  std::vector<std::uint32_t> violated;
  for (std::uint32_t c = 0; c < mrf.clause_count(); ++c)
    if (is_violated(mrf, c, a)) violated.push_back(c);
  std::vector<std::pair<std::uint64_t, double>> out;
  if (violated.empty()) return out;
  auto add = [&](std::uint64_t to, double p) {
    for (auto& kv : out)
      if (kv.first == to) {
        kv.second += p;
        return;
      }
    out.emplace_back(to, p);
  };
  double pc = 1.0 / static_cast<double>(violated.size());
  for (std::uint32_t c : violated) {
    auto lits = mrf.lits(c);
    std::vector<std::uint32_t> atoms;
    for (std::int32_t lit : lits)
      atoms.push_back(static_cast<std::uint32_t>((lit > 0 ? lit : -lit) - 1));
    // Greedy choice: the flip with the lowest resulting cost, lowest atom
    // index on ties.
    std::uint32_t best = atoms[0];
    Cost best_cost = state_cost(mrf, mask ^ (1ull << atoms[0]));
    for (size_t i = 1; i < atoms.size(); ++i) {
      Cost ci = state_cost(mrf, mask ^ (1ull << atoms[i]));
      if (ci < best_cost || (ci == best_cost && atoms[i] < best)) {
        best = atoms[i];
        best_cost = ci;
      }
    }
    for (std::uint32_t atom : atoms)
      add(mask ^ (1ull << atom), pc * noise / static_cast<double>(atoms.size()));
    add(mask ^ (1ull << best), pc * (1.0 - noise));
  }
  return out;
}

}  // namespace

RDiagnostic compute_r(std::span<const Mrf* const> components, double noise, size_t max_atoms) {
  RDiagnostic d;
  double best_num = -1.0;  // min over optima of v * (mass leaving the optima)
  double best_den = -1.0;  // max over near-optima of v * (mass entering)
  for (const Mrf* mp : components) {
    const Mrf& mrf = *mp;
    size_t n = mrf.atom_count();
    if (n == 0) continue;
    if (n > max_atoms) return d;  // not certifiable

    std::uint64_t count = 1ull << n;
    std::vector<Cost> costs(count);
    Cost opt{0, 0.0};
    for (std::uint64_t m = 0; m < count; ++m) {
      costs[m] = state_cost(mrf, m);
      if (m == 0 || costs[m] < opt) opt = costs[m];
    }
    std::vector<bool> is_opt(count);
    for (std::uint64_t m = 0; m < count; ++m) is_opt[m] = costs[m] == opt;

    // States one flip away from an optimum but not optimal themselves.
    std::vector<bool> near(count, false);
    for (std::uint64_t m = 0; m < count; ++m) {
      if (!is_opt[m]) continue;
      for (size_t b = 0; b < n; ++b) {
        std::uint64_t nb = m ^ (1ull << b);
        if (!is_opt[nb]) near[nb] = true;
      }
    }

    for (std::uint64_t m = 0; m < count; ++m) {
      if (is_opt[m]) {
        int v = violated_count(mrf, m);
        double leave = 0.0;
        for (auto& [to, p] : transitions(mrf, m, noise))
          if (!is_opt[to]) leave += p;
        double term = static_cast<double>(v) * leave;
        if (best_num < 0 || term < best_num) best_num = term;
      } else if (near[m]) {
        int v = violated_count(mrf, m);
        double enter = 0.0;
        for (auto& [to, p] : transitions(mrf, m, noise))
          if (is_opt[to]) enter += p;
        double term = static_cast<double>(v) * enter;
        if (term > best_den) best_den = term;
      }
    }
  }
  if (best_num < 0 || best_den <= 0) return d;
  d.numerator = best_num;
  d.denominator = best_den;
  d.r = best_num / best_den;
  d.defined = true;
  return d;
}

}  // namespace mlnmap
