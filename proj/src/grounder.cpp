#include "mlnmap/grounder.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <functional>
#include <unordered_map>

namespace mlnmap {

ClausalFormula expand_existentials(const ClausalFormula& f, const MLNProgram& prog, int cap) {
  ClausalFormula out = f;
  for (const std::string& var : f.existential_vars) {
    // The variable's domain comes from the predicate positions it fills.
    TypeId ty = -1;
    for (const Literal& lit : out.literals) {
      if (lit.equality) continue;
      const auto& decl = prog.predicates[static_cast<size_t>(lit.pred)];
      for (size_t i = 0; i < lit.args.size(); ++i)
        if (lit.args[i].is_variable && lit.args[i].name == var) {
          if (ty >= 0 && ty != decl.type_ids[i])
            throw Error("existential variable '" + var + "' used with two domain types");
          ty = decl.type_ids[i];
        }
    }
    if (ty < 0) continue;  // unused quantifier
    const auto& consts = prog.domains.constants(ty);
    if (consts.empty())
      throw Error("existential variable '" + var + "' ranges over an empty domain");
    if (static_cast<int>(consts.size()) > cap)
      throw Error("existential expansion over domain '" + prog.domains.type_name(ty) + "' (" +
                  std::to_string(consts.size()) + " constants) exceeds the cap of " +
                  std::to_string(cap));
    std::vector<Literal> expanded;
    for (const Literal& lit : out.literals) {
      bool contains = false;
      if (!lit.equality)
        for (const Term& t : lit.args)
          if (t.is_variable && t.name == var) contains = true;
      if (!contains) {
        expanded.push_back(lit);
        continue;
      }
      for (Sym c : consts) {
        Literal copy = lit;
        for (Term& t : copy.args)
          if (t.is_variable && t.name == var) {
            t.is_variable = false;
            t.name = prog.constants.name(c);
            t.sym = c;
          }
        expanded.push_back(std::move(copy));
      }
    }
    // Drop exact duplicates introduced by the expansion.
    std::vector<Literal> dedup;
    for (auto& lit : expanded) {
      bool seen = false;
      for (const auto& d : dedup)
        if (d == lit) {
          seen = true;
          break;
        }
      if (!seen) dedup.push_back(std::move(lit));
    }
    out.literals = std::move(dedup);
  }
  out.existential_vars.clear();
  return out;
}

GroundingQuery compile(const ClausalFormula& f, const MLNProgram& prog) {
  if (!f.existential_vars.empty())
    throw Error("existential variables must be expanded before compilation");
  if (f.literals.empty()) throw Error("cannot compile an empty clause");

  GroundingQuery q;
  q.weight = f.weight;
  q.source_id = f.source_id;

  auto var_index = [&](const std::string& name, TypeId ty) {
    for (int i = 0; i < q.num_vars; ++i)
      if (q.var_names[static_cast<size_t>(i)] == name) {
        if (ty >= 0) {
          TypeId& known = q.var_types[static_cast<size_t>(i)];
          if (known < 0) known = ty;
          else if (known != ty)
            throw Error("variable '" + name + "' used with two domain types ('" +
                        prog.domains.type_name(known) + "' and '" + prog.domains.type_name(ty) +
                        "')");
        }
        return i;
      }
    q.var_names.push_back(name);
    q.var_types.push_back(ty);
    return q.num_vars++;
  };

  for (const Literal& lit : f.literals) {
    if (lit.equality) continue;
    const auto& decl = prog.predicates[static_cast<size_t>(lit.pred)];
    if (lit.args.size() != decl.arg_types.size())
      throw Error("arity mismatch for predicate '" + decl.name + "'");
    CompiledLiteral cl;
    cl.pred = lit.pred;
    cl.negated = lit.negated;
    for (size_t i = 0; i < lit.args.size(); ++i) {
      const Term& t = lit.args[i];
      if (t.is_variable) {
        cl.var_slot.push_back(var_index(t.name, decl.type_ids[i]));
        cl.const_arg.push_back(-1);
      } else {
        if (!prog.domains.contains(decl.type_ids[i], t.sym))
          throw Error("constant '" + t.name + "' is not in domain '" +
                      prog.domains.type_name(decl.type_ids[i]) + "'");
        cl.var_slot.push_back(-1);
        cl.const_arg.push_back(t.sym);
      }
    }
    q.literals.push_back(std::move(cl));
  }

  for (const Literal& lit : f.literals) {
    if (!lit.equality) continue;
    CompiledEquality eq;
    eq.negated = lit.negated;
    auto side = [&](const Term& t, int& var, Sym& c) {
      if (t.is_variable) {
        // Type is pinned by the variable's occurrences in real literals.
        for (int i = 0; i < q.num_vars; ++i)
          if (q.var_names[static_cast<size_t>(i)] == t.name) {
            var = i;
            return;
          }
        throw Error("variable '" + t.name + "' appears only in equality literals");
      }
      if (prog.domains.type_of(t.sym) < 0)
        throw Error("constant '" + t.name + "' is not in any domain");
      c = t.sym;
    };
    side(lit.args[0], eq.lhs_var, eq.lhs_const);
    side(lit.args[1], eq.rhs_var, eq.rhs_const);
    auto type_of_side = [&](int var, Sym c) {
      return var >= 0 ? q.var_types[static_cast<size_t>(var)] : prog.domains.type_of(c);
    };
    TypeId lt = type_of_side(eq.lhs_var, eq.lhs_const);
    TypeId rt = type_of_side(eq.rhs_var, eq.rhs_const);
    if (lt >= 0 && rt >= 0 && lt != rt)
      throw Error("equality compares different domains ('" + prog.domains.type_name(lt) +
                  "' vs '" + prog.domains.type_name(rt) + "')");
    q.equalities.push_back(eq);
  }

  for (int i = 0; i < q.num_vars; ++i)
    if (q.var_types[static_cast<size_t>(i)] < 0)
      throw Error("variable '" + q.var_names[static_cast<size_t>(i)] +
                  "' appears only in equality literals");
  return q;
}

namespace {

enum class ScanMode { RowScan, RowScanActive, DomainEnum };

struct PlanStep {
  int lit = -1;
  ScanMode mode = ScanMode::DomainEnum;
  std::uint64_t estimate = 0;
  std::vector<int> eq_after;  // equalities evaluable once this step bound its vars
};

ScanMode mode_of(const CompiledLiteral& cl, const AtomStore& store, bool positive_sem,
                 bool with_active) {
  bool closed = store.meta(cl.pred).closed_world;
  if (cl.negated && closed) return ScanMode::RowScan;
  if (cl.negated && !closed && with_active && positive_sem) return ScanMode::RowScanActive;
  return ScanMode::DomainEnum;
}

std::uint64_t estimate_step(const CompiledLiteral& cl, ScanMode mode, const AtomStore& store,
                            const DomainCatalog& dom, const GroundingQuery& q,
                            const std::vector<bool>& bound) {
  if (mode != ScanMode::DomainEnum) return store.relation(cl.pred).size();
  std::uint64_t est = 1;
  std::vector<int> seen;
  for (size_t i = 0; i < cl.var_slot.size(); ++i) {
    int v = cl.var_slot[i];
    if (v < 0 || bound[static_cast<size_t>(v)]) continue;
    if (std::find(seen.begin(), seen.end(), v) != seen.end()) continue;
    seen.push_back(v);
    std::uint64_t d = dom.constants(q.var_types[static_cast<size_t>(v)]).size();
    if (d == 0) return 0;
    est = (est > (1ull << 62) / std::max<std::uint64_t>(d, 1)) ? (1ull << 62) : est * d;
  }
  return est;
}

std::vector<PlanStep> make_plan(const GroundingQuery& q, const AtomStore& store,
                                bool with_active, const GroundingOptions& opt,
                                std::vector<int>* eq_pre) {
  std::vector<PlanStep> steps;
  std::vector<bool> bound(static_cast<size_t>(q.num_vars), false);
  std::vector<bool> used(q.literals.size(), false);
  bool positive_sem = q.weight.positive_semantics();
  for (size_t n = 0; n < q.literals.size(); ++n) {
    int best = -1;
    std::uint64_t best_est = 0;
    ScanMode best_mode = ScanMode::DomainEnum;
    for (size_t i = 0; i < q.literals.size(); ++i) {
      if (used[i]) continue;
      ScanMode m = mode_of(q.literals[i], store, positive_sem, with_active);
      std::uint64_t est = estimate_step(q.literals[i], m, store, store.domains(), q, bound);
      if (best < 0 || est < best_est) {
        best = static_cast<int>(i);
        best_est = est;
        best_mode = m;
      }
    }
    used[static_cast<size_t>(best)] = true;
    steps.push_back({best, best_mode, best_est, {}});
    for (int v : q.literals[static_cast<size_t>(best)].var_slot)
      if (v >= 0) bound[static_cast<size_t>(v)] = true;
  }
  if (opt.reverse_order) std::reverse(steps.begin(), steps.end());

  // Attach each equality to the earliest point where both sides are bound.
  std::fill(bound.begin(), bound.end(), false);
  std::vector<bool> eq_done(q.equalities.size(), false);
  for (size_t e = 0; e < q.equalities.size(); ++e) {
    const auto& eq = q.equalities[e];
    if (eq.lhs_var < 0 && eq.rhs_var < 0) {
      eq_pre->push_back(static_cast<int>(e));
      eq_done[e] = true;
    }
  }
  for (auto& step : steps) {
    for (int v : q.literals[static_cast<size_t>(step.lit)].var_slot)
      if (v >= 0) bound[static_cast<size_t>(v)] = true;
    for (size_t e = 0; e < q.equalities.size(); ++e) {
      if (eq_done[e]) continue;
      const auto& eq = q.equalities[e];
      bool ok = (eq.lhs_var < 0 || bound[static_cast<size_t>(eq.lhs_var)]) &&
                (eq.rhs_var < 0 || bound[static_cast<size_t>(eq.rhs_var)]);
      if (ok) {
        step.eq_after.push_back(static_cast<int>(e));
        eq_done[e] = true;
      }
    }
  }
  return steps;
}

// Equality literal truth under a binding; true means the clause is satisfied.
bool equality_satisfied(const CompiledEquality& eq, const std::vector<Sym>& binding) {
  Sym l = eq.lhs_var >= 0 ? binding[static_cast<size_t>(eq.lhs_var)] : eq.lhs_const;
  Sym r = eq.rhs_var >= 0 ? binding[static_cast<size_t>(eq.rhs_var)] : eq.rhs_const;
  return (l == r) != eq.negated;
}

struct Enumerator {
  const GroundingQuery& q;
  AtomStore& store;
  const ActiveSet* active;
  const GroundingOptions& opt;

  bool row_qualifies(const CompiledLiteral& cl, ScanMode mode, size_t row) const {
    const Relation& rel = store.relation(cl.pred);
    TruthValue t = rel.truth(row);
    if (mode == ScanMode::RowScan) {
      if (t != TruthValue::True) return false;  // closed world: keep only true rows
    } else {  // RowScanActive
      if (t == TruthValue::False) return false;
      if (t == TruthValue::Unknown && !active->is_active(rel.aid(row))) return false;
    }
    auto args = rel.args(row);
    for (size_t i = 0; i < args.size(); ++i) {
      if (cl.const_arg[i] >= 0 && args[i] != cl.const_arg[i]) return false;
      int v = cl.var_slot[i];
      if (v < 0) continue;
      // Repeated variable inside the literal: positions must agree.
      for (size_t j = 0; j < i; ++j)
        if (cl.var_slot[j] == v && args[j] != args[i]) return false;
    }
    return true;
  }

  bool row_matches_binding(const CompiledLiteral& cl, size_t row,
                           const std::vector<Sym>& binding) const {
    auto args = store.relation(cl.pred).args(row);
    for (size_t i = 0; i < args.size(); ++i) {
      int v = cl.var_slot[i];
      if (v >= 0 && binding[static_cast<size_t>(v)] >= 0 &&
          binding[static_cast<size_t>(v)] != args[i])
        return false;
    }
    return true;
  }

  void extend_from_row(const CompiledLiteral& cl, size_t row, std::vector<Sym> binding,
                       std::vector<std::vector<Sym>>& out) const {
    auto args = store.relation(cl.pred).args(row);
    for (size_t i = 0; i < args.size(); ++i) {
      int v = cl.var_slot[i];
      if (v >= 0) binding[static_cast<size_t>(v)] = args[i];
    }
    out.push_back(std::move(binding));
  }

  // Domain enumeration: iterate the unbound variables of the literal over
  // their domains, look up each candidate tuple, apply the truth filter.
  void domain_extend(const CompiledLiteral& cl, const std::vector<Sym>& binding,
                     std::vector<std::vector<Sym>>& out) const {
    std::vector<int> free_vars;
    for (int v : cl.var_slot)
      if (v >= 0 && binding[static_cast<size_t>(v)] < 0 &&
          std::find(free_vars.begin(), free_vars.end(), v) == free_vars.end())
        free_vars.push_back(v);

    std::vector<Sym> tuple(cl.var_slot.size());
    std::vector<Sym> work = binding;
    auto emit_candidate = [&]() {
      for (size_t i = 0; i < cl.var_slot.size(); ++i)
        tuple[i] = cl.var_slot[i] >= 0 ? work[static_cast<size_t>(cl.var_slot[i])]
                                       : cl.const_arg[i];
      TruthValue t = store.effective_truth(cl.pred, tuple);
      if (!cl.negated && t == TruthValue::True) return;   // satisfied by evidence
      if (cl.negated && t == TruthValue::False) return;   // satisfied by evidence
      out.push_back(work);
    };
    std::function<void(size_t)> rec = [&](size_t k) {
      if (k == free_vars.size()) {
        emit_candidate();
        return;
      }
      int v = free_vars[k];
      for (Sym c : store.domains().constants(q.var_types[static_cast<size_t>(v)])) {
        work[static_cast<size_t>(v)] = c;
        rec(k + 1);
      }
      work[static_cast<size_t>(v)] = -1;
    };
    rec(0);
  }
};

}  // namespace

ExecuteResult execute(const GroundingQuery& q, AtomStore& store, const ActiveSet* active,
                      const GroundingOptions& opt, GroundStats* stats) {
  std::vector<int> eq_pre;
  auto steps = make_plan(q, store, active != nullptr, opt, &eq_pre);

  ExecuteResult res;
  GroundStats local;
  // A satisfied constant equality kills every binding of the formula.
  for (int e : eq_pre)
    if (equality_satisfied(q.equalities[static_cast<size_t>(e)], {})) {
      if (stats) {
        *stats = local;
        stats->satisfied_dropped = 1;
      }
      return res;
    }

  if (opt.explain) {
    local.plan = "order:";
    for (const auto& s : steps) {
      const auto& cl = q.literals[static_cast<size_t>(s.lit)];
      local.plan += " " + store.meta(cl.pred).name;
      local.plan += s.mode == ScanMode::RowScan         ? "[scan"
                    : s.mode == ScanMode::RowScanActive ? "[scan+active"
                                                        : "[enum";
      local.plan += "," + std::to_string(s.estimate) + "]";
    }
    local.plan += opt.algorithm == JoinAlgorithm::Hash ? " hash" : " nested-loop";
  }

  Enumerator en{q, store, active, opt};
  std::vector<std::vector<Sym>> bindings;
  bindings.emplace_back(static_cast<size_t>(q.num_vars), -1);

  for (const auto& step : steps) {
    const CompiledLiteral& cl = q.literals[static_cast<size_t>(step.lit)];
    std::vector<std::vector<Sym>> next;

    if (step.mode == ScanMode::DomainEnum) {
      for (const auto& b : bindings) en.domain_extend(cl, b, next);
    } else if (opt.algorithm == JoinAlgorithm::NestedLoop) {
      const Relation& rel = store.relation(cl.pred);
      for (const auto& b : bindings)
        for (size_t row = 0; row < rel.size(); ++row) {
          if (!en.row_qualifies(cl, step.mode, row)) continue;
          if (!en.row_matches_binding(cl, row, b)) continue;
          en.extend_from_row(cl, row, b, next);
        }
    } else {
      // Hash join: key on every position holding an already-bound variable.
      std::vector<size_t> key_pos;
      std::vector<bool> bound(static_cast<size_t>(q.num_vars), false);
      if (!bindings.empty())
        for (size_t v = 0; v < bindings[0].size(); ++v) bound[v] = bindings[0][v] >= 0;
      for (size_t i = 0; i < cl.var_slot.size(); ++i)
        if (cl.var_slot[i] >= 0 && bound[static_cast<size_t>(cl.var_slot[i])])
          key_pos.push_back(i);
      const Relation& rel = store.relation(cl.pred);
      std::unordered_map<std::string, std::vector<std::uint32_t>> table;
      std::string key;
      for (size_t row = 0; row < rel.size(); ++row) {
        if (!en.row_qualifies(cl, step.mode, row)) continue;
        auto args = rel.args(row);
        key.clear();
        for (size_t p : key_pos)
          key.append(reinterpret_cast<const char*>(&args[p]), sizeof(Sym));
        table[key].push_back(static_cast<std::uint32_t>(row));
      }
      for (const auto& b : bindings) {
        key.clear();
        for (size_t p : key_pos) {
          Sym v = b[static_cast<size_t>(cl.var_slot[p])];
          key.append(reinterpret_cast<const char*>(&v), sizeof(Sym));
        }
        auto it = table.find(key);
        if (it == table.end()) continue;
        for (std::uint32_t row : it->second) en.extend_from_row(cl, row, b, next);
      }
    }

    // Equality filters that became evaluable at this step.
    if (!step.eq_after.empty()) {
      std::vector<std::vector<Sym>> kept;
      kept.reserve(next.size());
      for (auto& b : next) {
        bool satisfied = false;
        for (int e : step.eq_after)
          if (equality_satisfied(q.equalities[static_cast<size_t>(e)], b)) {
            satisfied = true;
            break;
          }
        if (satisfied) local.satisfied_dropped += 1;
        else kept.push_back(std::move(b));
      }
      next = std::move(kept);
    }
    bindings = std::move(next);
    if (bindings.empty()) break;
  }

  local.bindings = bindings.size();
  // Canonical emission order: aid assignment must not depend on the join
  // algorithm or the join order.
  std::sort(bindings.begin(), bindings.end());

  struct PendingLit {
    int pred;
    std::vector<Sym> args;
    bool negated;
    Aid aid;  // 0 when the atom does not exist yet
    TruthValue truth;
  };
  std::vector<PendingLit> pend;
  for (const auto& b : bindings) {
    pend.clear();
    bool drop = false;
    for (const CompiledLiteral& cl : q.literals) {
      PendingLit pl;
      pl.pred = cl.pred;
      pl.negated = cl.negated;
      pl.args.resize(cl.var_slot.size());
      for (size_t i = 0; i < cl.var_slot.size(); ++i)
        pl.args[i] = cl.var_slot[i] >= 0 ? b[static_cast<size_t>(cl.var_slot[i])]
                                         : cl.const_arg[i];
      pl.aid = store.find(cl.pred, pl.args);
      pl.truth = pl.aid ? store.truth(pl.aid)
                        : (store.meta(cl.pred).closed_world ? TruthValue::False
                                                            : TruthValue::Unknown);
      // Falsified closed-world literals over absent tuples have no row to
      // reference; they simply drop out of the disjunction.
      if (!cl.negated && pl.truth == TruthValue::False && pl.aid == 0) continue;
      pend.push_back(std::move(pl));
    }

    // Lazy mode, negative-weight clause: violable only if some literal can
    // still become true by flipping active atoms.
    if (active && !q.weight.positive_semantics()) {
      bool violable = false;
      for (const auto& pl : pend) {
        if (pl.truth != TruthValue::Unknown) continue;
        if (pl.negated || (pl.aid != 0 && active->is_active(pl.aid))) {
          violable = true;
          break;
        }
      }
      if (!violable) continue;
    }

    // Tautology and duplicate-literal elimination on atom identity.
    std::vector<std::int64_t> lits;
    std::vector<size_t> kept;
    for (size_t i = 0; i < pend.size() && !drop; ++i) {
      bool dup = false;
      for (size_t j : kept) {
        const auto& a = pend[i];
        const auto& o = pend[j];
        if (a.pred == o.pred && a.args == o.args) {
          if (a.negated != o.negated) drop = true;  // P v !P
          dup = true;
          break;
        }
      }
      if (!dup) kept.push_back(i);
    }
    if (drop) {
      local.tautologies_dropped += 1;
      continue;
    }
    if (kept.empty()) {
      // Fully decided by evidence: a constant violation when the weight is
      // positive, nothing at all when it is negative.
      if (q.weight.positive_semantics()) {
        if (q.weight.is_hard()) res.constant_hard += 1;
        else res.constant_soft += std::abs(q.weight.value);
      }
      continue;
    }
    for (size_t i : kept) {
      auto& pl = pend[i];
      if (pl.aid == 0) pl.aid = store.get_or_create(pl.pred, pl.args);
      lits.push_back(pl.negated ? -pl.aid : pl.aid);
    }
    res.rows.push_back(std::move(lits));
    local.rows += 1;
  }
  local.constant_hard = res.constant_hard;
  local.constant_soft = res.constant_soft;
  if (stats) *stats = local;
  return res;
}

namespace {

GroundingResult ground_pass(const std::vector<GroundingQuery>& queries, AtomStore& store,
                            const ActiveSet* active, const GroundingOptions& opt) {
  GroundingResult out;
  for (const auto& q : queries) {
    GroundStats stats;
    ExecuteResult r = execute(q, store, active, opt, &stats);
    for (auto& row : r.rows) out.table.add(row, q.weight);
    out.constant_hard += r.constant_hard;
    out.constant_soft += r.constant_soft;
    out.per_formula.push_back(std::move(stats));
  }
  return out;
}

std::vector<GroundingQuery> compile_all(const std::vector<ClausalFormula>& formulas,
                                        const MLNProgram& prog, const GroundingOptions& opt) {
  std::vector<GroundingQuery> queries;
  for (const auto& f : formulas) {
    ClausalFormula expanded =
        f.existential_vars.empty() ? f : expand_existentials(f, prog, opt.existential_cap);
    queries.push_back(compile(expanded, prog));
  }
  return queries;
}

}  // namespace

GroundingResult ground_full(const std::vector<ClausalFormula>& formulas, const MLNProgram& prog,
                            AtomStore& store, const GroundingOptions& opt) {
  auto queries = compile_all(formulas, prog, opt);
  GroundingResult res = ground_pass(queries, store, nullptr, opt);
  res.iterations = 1;
  return res;
}

GroundingResult active_closure(const std::vector<ClausalFormula>& formulas,
                               const MLNProgram& prog, AtomStore& store,
                               const GroundingOptions& opt) {
  auto queries = compile_all(formulas, prog, opt);
  ActiveSet active;
  GroundingResult res;
  int iterations = 0;
  for (;;) {
    ++iterations;
    // Rebuild from scratch so weight merging never double-counts a clause
    // rederived in a later pass.
    res = ground_pass(queries, store, &active, opt);
    size_t before = active.count();
    for (const auto& row : res.table.rows())
      for (std::int64_t lit : row.lits) {
        Aid aid = lit > 0 ? lit : -lit;
        if (store.truth(aid) == TruthValue::Unknown) active.activate(aid);
      }
    if (active.count() == before) break;
  }
  res.iterations = iterations;
  res.active = std::move(active);
  return res;
}

}  // namespace mlnmap
