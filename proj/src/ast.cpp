#include "mlnmap/ast.hpp"

#include <charconv>
#include <cstdio>

namespace mlnmap {

std::string format_weight(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

static bool bare_constant_ok(const std::string& s) {
  if (s.empty()) return false;
  char c = s[0];
  if (!(c == '_' || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9'))) return false;
  for (char ch : s)
    if (!(ch == '_' || (ch >= 'A' && ch <= 'Z') || (ch >= 'a' && ch <= 'z') ||
          (ch >= '0' && ch <= '9')))
      return false;
  return true;
}

std::string to_string(const Term& t) {
  if (t.is_variable || bare_constant_ok(t.name)) return t.name;
  return "'" + t.name + "'";
}

std::string to_string(const Literal& lit, const MLNProgram& prog) {
  std::string s;
  if (lit.equality) {
    s = to_string(lit.args[0]) + (lit.negated ? " != " : " = ") + to_string(lit.args[1]);
    return s;
  }
  if (lit.negated) s += "!";
  s += prog.predicates[static_cast<size_t>(lit.pred)].name;
  s += "(";
  for (size_t i = 0; i < lit.args.size(); ++i) {
    if (i) s += ", ";
    s += to_string(lit.args[i]);
  }
  s += ")";
  return s;
}

static std::string join_literals(const std::vector<Literal>& lits, const MLNProgram& prog,
                                 const char* sep) {
  std::string s;
  for (size_t i = 0; i < lits.size(); ++i) {
    if (i) s += sep;
    s += to_string(lits[i], prog);
  }
  return s;
}

static std::string exist_prefix(const std::vector<std::string>& vars) {
  if (vars.empty()) return "";
  std::string s = "EXIST ";
  for (size_t i = 0; i < vars.size(); ++i) {
    if (i) s += ", ";
    s += vars[i];
  }
  s += " ";
  return s;
}

std::string to_string(const ParsedFormula& f, const MLNProgram& prog) {
  std::string s;
  if (f.weight.tier == WeightTier::Soft) s += format_weight(f.weight.value) + "  ";
  if (!f.body.empty()) {
    s += join_literals(f.body, prog, ", ");
    s += " => ";
  }
  s += exist_prefix(f.existential_vars);
  s += join_literals(f.head, prog, f.head_conjunction ? ", " : " v ");
  if (f.weight.tier == WeightTier::Hard) s += ".";
  if (f.weight.tier == WeightTier::HardNegated) s += " !.";
  return s;
}

std::string to_string(const ClausalFormula& f, const MLNProgram& prog) {
  std::string s;
  if (f.weight.tier == WeightTier::Soft) s += format_weight(f.weight.value) + "  ";
  s += exist_prefix(f.existential_vars);
  s += join_literals(f.literals, prog, " v ");
  if (f.weight.tier == WeightTier::Hard) s += ".";
  if (f.weight.tier == WeightTier::HardNegated) s += " !.";
  return s;
}

std::string print_program(const MLNProgram& prog) {
  std::string s;
  for (size_t t = 0; t < prog.domains.type_count(); ++t) {
    const auto& consts = prog.domains.constants(static_cast<TypeId>(t));
    if (consts.empty()) continue;
    s += "domain " + prog.domains.type_name(static_cast<TypeId>(t)) + " = {";
    for (size_t i = 0; i < consts.size(); ++i) {
      if (i) s += ", ";
      const std::string& n = prog.constants.name(consts[i]);
      s += bare_constant_ok(n) ? n : "'" + n + "'";
    }
    s += "}\n";
  }
  for (const auto& p : prog.predicates) {
    if (p.closed_world) s += "*";
    s += p.name + "(";
    for (size_t i = 0; i < p.arg_types.size(); ++i) {
      if (i) s += ", ";
      s += p.arg_types[i];
    }
    s += ")\n";
  }
  for (const auto& f : prog.formulas) s += to_string(f, prog) + "\n";
  return s;
}

bool structurally_equal(const MLNProgram& a, const MLNProgram& b) {
  if (a.predicates != b.predicates) return false;
  if (a.formulas.size() != b.formulas.size()) return false;
  for (size_t i = 0; i < a.formulas.size(); ++i)
    if (!(a.formulas[i] == b.formulas[i])) return false;
  if (a.domains.type_count() != b.domains.type_count()) return false;
  for (size_t t = 0; t < a.domains.type_count(); ++t) {
    TypeId tid = static_cast<TypeId>(t);
    if (a.domains.type_name(tid) != b.domains.type_name(tid)) return false;
    const auto& ca = a.domains.constants(tid);
    const auto& cb = b.domains.constants(tid);
    if (ca.size() != cb.size()) return false;
    for (size_t i = 0; i < ca.size(); ++i)
      if (a.constants.name(ca[i]) != b.constants.name(cb[i])) return false;
  }
  return true;
}

}  // namespace mlnmap
