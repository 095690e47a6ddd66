// Reference implementations used only by tests. Everything here grounds by
// direct enumeration over the full domain product, with no joins, so the
// fast path can be checked against it.
#include "mlnmap/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "mlnmap/ast.hpp"

namespace mlnmap {

namespace {

struct FlatLit {
  int pred = -1;
  bool negated = false;
  std::vector<int> var_of_arg;  // -1 for constant positions
  std::vector<Sym> const_of_arg;
};

struct FlatEq {
  bool negated = false;
  int lhs_var = -1, rhs_var = -1;
  Sym lhs_const = -1, rhs_const = -1;
};

struct FlatFormula {
  Weight weight;
  int num_vars = 0;
  std::vector<TypeId> var_types;
  std::vector<FlatLit> lits;
  std::vector<FlatEq> eqs;
};

// Substitute one existential variable by every constant of its domain,
// multiplying out the literals that mention it.
std::vector<Literal> substitute_out(const std::vector<Literal>& lits, const std::string& var,
                                    const std::vector<Sym>& consts, const MLNProgram& prog) {
  std::vector<Literal> out;
  for (const Literal& lit : lits) {
    bool mentions = false;
    if (!lit.equality)
      for (const Term& t : lit.args)
        if (t.is_variable && t.name == var) mentions = true;
    if (!mentions) {
      out.push_back(lit);
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
      out.push_back(std::move(copy));
    }
  }
  std::vector<Literal> dedup;
  for (auto& lit : out) {
    bool seen = false;
    for (const auto& d : dedup)
      if (d == lit) seen = true;
    if (!seen) dedup.push_back(std::move(lit));
  }
  return dedup;
}

FlatFormula flatten(const ClausalFormula& f, const MLNProgram& prog) {
  std::vector<Literal> lits = f.literals;
  for (const std::string& var : f.existential_vars) {
    TypeId ty = -1;
    for (const Literal& lit : lits) {
      if (lit.equality) continue;
      const auto& decl = prog.predicates[static_cast<size_t>(lit.pred)];
      for (size_t i = 0; i < lit.args.size(); ++i)
        if (lit.args[i].is_variable && lit.args[i].name == var) ty = decl.type_ids[i];
    }
    if (ty < 0) continue;
    lits = substitute_out(lits, var, prog.domains.constants(ty), prog);
  }

  FlatFormula out;
  out.weight = f.weight;
  std::vector<std::string> names;
  auto var_index = [&](const std::string& name, TypeId ty) {
    for (size_t i = 0; i < names.size(); ++i)
      if (names[i] == name) return static_cast<int>(i);
    names.push_back(name);
    out.var_types.push_back(ty);
    return out.num_vars++;
  };
  for (const Literal& lit : lits) {
    if (lit.equality) continue;
    const auto& decl = prog.predicates[static_cast<size_t>(lit.pred)];
    FlatLit fl;
    fl.pred = lit.pred;
    fl.negated = lit.negated;
    for (size_t i = 0; i < lit.args.size(); ++i) {
      if (lit.args[i].is_variable) {
        fl.var_of_arg.push_back(var_index(lit.args[i].name, decl.type_ids[i]));
        fl.const_of_arg.push_back(-1);
      } else {
        fl.var_of_arg.push_back(-1);
        fl.const_of_arg.push_back(lit.args[i].sym);
      }
    }
    out.lits.push_back(std::move(fl));
  }
  for (const Literal& lit : lits) {
    if (!lit.equality) continue;
    FlatEq eq;
    eq.negated = lit.negated;
    auto side = [&](const Term& t, int& var, Sym& c) {
      if (t.is_variable) {
        for (size_t i = 0; i < names.size(); ++i)
          if (names[i] == t.name) {
            var = static_cast<int>(i);
            return;
          }
        throw Error("variable '" + t.name + "' appears only in equality literals");
      }
      c = t.sym;
    };
    side(lit.args[0], eq.lhs_var, eq.lhs_const);
    side(lit.args[1], eq.rhs_var, eq.rhs_const);
    out.eqs.push_back(eq);
  }
  return out;
}

struct PendingAtom {
  int pred;
  std::vector<Sym> args;
  bool negated;
  Aid aid;
  TruthValue truth;
};

// One candidate ground clause under one variable assignment, evidence
// already folded in. Empty result with satisfied=true means the binding
// produced no clause at all.
struct Candidate {
  bool satisfied = false;
  bool tautology = false;
  std::vector<PendingAtom> pend;
};

Candidate evaluate_binding(const FlatFormula& f, const std::vector<Sym>& binding,
                           const AtomStore& store) {
  Candidate c;
  for (const FlatEq& eq : f.eqs) {
    Sym l = eq.lhs_var >= 0 ? binding[static_cast<size_t>(eq.lhs_var)] : eq.lhs_const;
    Sym r = eq.rhs_var >= 0 ? binding[static_cast<size_t>(eq.rhs_var)] : eq.rhs_const;
    if ((l == r) != eq.negated) {
      c.satisfied = true;
      return c;
    }
  }
  std::vector<Sym> args;
  for (const FlatLit& lit : f.lits) {
    args.clear();
    for (size_t i = 0; i < lit.var_of_arg.size(); ++i)
      args.push_back(lit.var_of_arg[i] >= 0 ? binding[static_cast<size_t>(lit.var_of_arg[i])]
                                            : lit.const_of_arg[i]);
    Aid aid = store.find(lit.pred, args);
    TruthValue t = aid ? store.truth(aid)
                       : (store.meta(lit.pred).closed_world ? TruthValue::False
                                                            : TruthValue::Unknown);
    if (!lit.negated && t == TruthValue::True) {
      c.satisfied = true;
      return c;
    }
    if (lit.negated && t == TruthValue::False) {
      c.satisfied = true;
      return c;
    }
    if (!lit.negated && t == TruthValue::False && aid == 0) continue;
    c.pend.push_back({lit.pred, args, lit.negated, aid, t});
  }
  // Duplicate and complementary literal handling on atom identity.
  std::vector<PendingAtom> kept;
  for (const auto& p : c.pend) {
    bool dup = false;
    for (const auto& k : kept)
      if (k.pred == p.pred && k.args == p.args) {
        if (k.negated != p.negated) c.tautology = true;
        dup = true;
        break;
      }
    if (!dup) kept.push_back(p);
  }
  c.pend = std::move(kept);
  return c;
}

void enumerate_bindings(const FlatFormula& f, const DomainCatalog& dom,
                        const std::function<void(const std::vector<Sym>&)>& fn) {
  std::vector<Sym> binding(static_cast<size_t>(f.num_vars), -1);
  std::function<void(int)> rec = [&](int k) {
    if (k == f.num_vars) {
      fn(binding);
      return;
    }
    for (Sym c : dom.constants(f.var_types[static_cast<size_t>(k)])) {
      binding[static_cast<size_t>(k)] = c;
      rec(k + 1);
    }
  };
  rec(0);
}

// True when some assignment of the free atoms violates the clause. Atoms in
// `pinned_false` are unknown but held false; the rest of the unknowns range
// over both values.
bool violable(const Candidate& c, const Weight& w, const ActiveSet& active) {
  std::vector<size_t> free_idx;
  for (size_t i = 0; i < c.pend.size(); ++i) {
    const auto& p = c.pend[i];
    if (p.truth == TruthValue::Unknown && p.aid != 0 && active.is_active(p.aid))
      free_idx.push_back(i);
  }
  std::uint64_t combos = 1ull << free_idx.size();
  for (std::uint64_t m = 0; m < combos; ++m) {
    bool any_true = false;
    for (size_t i = 0; i < c.pend.size(); ++i) {
      const auto& p = c.pend[i];
      bool val;
      if (p.truth == TruthValue::Unknown) {
        // Inactive unknown atoms are pinned false; entries are deduplicated
        // so no two share an atom.
        auto it = std::find(free_idx.begin(), free_idx.end(), i);
        val = it != free_idx.end() && ((m >> (it - free_idx.begin())) & 1);
      } else {
        val = p.truth == TruthValue::True;
      }
      if (val != p.negated) any_true = true;
    }
    bool violated = w.positive_semantics() ? !any_true : any_true;
    if (violated) return true;
  }
  return false;
}

OracleGrounding ground_with(const std::vector<ClausalFormula>& formulas, const MLNProgram& prog,
                            AtomStore& store, const ActiveSet* active) {
  OracleGrounding out;
  std::vector<FlatFormula> flats;
  for (const auto& f : formulas) flats.push_back(flatten(f, prog));
  for (const auto& f : flats) {
    enumerate_bindings(f, store.domains(), [&](const std::vector<Sym>& binding) {
      Candidate c = evaluate_binding(f, binding, store);
      if (c.satisfied || c.tautology) return;
      if (c.pend.empty()) {
        if (f.weight.positive_semantics()) {
          if (f.weight.is_hard()) out.constant_hard += 1;
          else out.constant_soft += std::abs(f.weight.value);
        }
        return;
      }
      if (active && !violable(c, f.weight, *active)) return;
      std::vector<std::int64_t> lits;
      for (auto& p : c.pend) {
        Aid aid = p.aid ? p.aid : store.get_or_create(p.pred, p.args);
        lits.push_back(p.negated ? -aid : aid);
      }
      out.table.add(lits, f.weight);
    });
  }
  return out;
}

}  // namespace

OracleGrounding oracle_ground_full(const std::vector<ClausalFormula>& formulas,
                                   const MLNProgram& prog, AtomStore& store) {
  OracleGrounding g = ground_with(formulas, prog, store, nullptr);
  g.iterations = 1;
  return g;
}

OracleGrounding oracle_active_closure(const std::vector<ClausalFormula>& formulas,
                                      const MLNProgram& prog, AtomStore& store) {
  ActiveSet active;
  OracleGrounding out;
  int iterations = 0;
  for (;;) {
    ++iterations;
    out = ground_with(formulas, prog, store, &active);
    size_t before = active.count();
    for (const auto& row : out.table.rows())
      for (std::int64_t lit : row.lits) {
        Aid aid = lit > 0 ? lit : -lit;
        if (store.truth(aid) == TruthValue::Unknown) active.activate(aid);
      }
    if (active.count() == before) break;
  }
  out.iterations = iterations;
  out.active = std::move(active);
  return out;
}

OracleMap oracle_map(const ClauseTable& table, std::uint64_t constant_hard,
                     double constant_soft, const AtomStore& store, size_t max_query_atoms) {
  std::vector<Aid> atoms;
  for (const auto& row : table.rows())
    for (std::int64_t lit : row.lits) {
      Aid aid = lit > 0 ? lit : -lit;
      if (store.truth(aid) == TruthValue::Unknown) atoms.push_back(aid);
    }
  std::sort(atoms.begin(), atoms.end());
  atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
  if (atoms.size() > max_query_atoms)
    throw Error("too many query atoms for exhaustive search: " + std::to_string(atoms.size()));

  std::map<Aid, size_t> index;
  for (size_t i = 0; i < atoms.size(); ++i) index[atoms[i]] = i;

  OracleMap best;
  best.query_atoms = atoms.size();
  std::uint64_t combos = 1ull << atoms.size();
  for (std::uint64_t m = 0; m < combos; ++m) {
    Cost c{constant_hard, constant_soft};
    for (const auto& row : table.rows()) {
      bool any_true = false;
      for (std::int64_t lit : row.lits) {
        Aid aid = lit > 0 ? lit : -lit;
        TruthValue t = store.truth(aid);
        bool val = t == TruthValue::Unknown ? ((m >> index[aid]) & 1) != 0
                                            : t == TruthValue::True;
        if (val == (lit > 0)) any_true = true;
      }
      bool violated = row.weight.positive_semantics() ? !any_true : any_true;
      if (!violated || (row.weight.tier == WeightTier::Soft && row.weight.value == 0.0))
        continue;
      if (row.weight.is_hard()) c.hard += 1;
      else c.soft += std::abs(row.weight.value);
    }
    if (m == 0 || c < best.optimum) {
      best.optimum = c;
      best.true_atoms.clear();
      for (size_t i = 0; i < atoms.size(); ++i)
        if ((m >> i) & 1) best.true_atoms.push_back(atoms[i]);
    }
  }
  return best;
}

std::set<std::string> canonical_clause_set(const ClauseTable& table, const AtomStore& store) {
  std::set<std::string> out;
  for (const auto& row : table.rows()) {
    std::vector<std::string> parts;
    for (std::int64_t lit : row.lits) {
      Aid aid = lit > 0 ? lit : -lit;
      parts.push_back((lit > 0 ? "" : "!") + store.atom_text(aid));
    }
    std::sort(parts.begin(), parts.end());
    std::string s;
    switch (row.weight.tier) {
      case WeightTier::Hard: s = "H"; break;
      case WeightTier::HardNegated: s = "N"; break;
      case WeightTier::Soft: s = "S" + format_weight(row.weight.value); break;
    }
    s += "|";
    for (size_t i = 0; i < parts.size(); ++i) {
      if (i) s += " v ";
      s += parts[i];
    }
    out.insert(std::move(s));
  }
  return out;
}

}  // namespace mlnmap
