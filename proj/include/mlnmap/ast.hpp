#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mlnmap/symbols.hpp"

namespace mlnmap {

struct Term {
  bool is_variable = false;
  std::string name;
  Sym sym = -1;  // resolved constant; -1 for variables

  bool operator==(const Term& o) const {
    return is_variable == o.is_variable && name == o.name;
  }
};

// pred < 0 with equality=true encodes the built-in equality literal.
struct Literal {
  int pred = -1;
  bool equality = false;
  bool negated = false;
  std::vector<Term> args;

  bool operator==(const Literal&) const = default;
};

struct PredicateDecl {
  std::string name;
  std::vector<std::string> arg_types;
  std::vector<TypeId> type_ids;
  bool closed_world = false;

  bool operator==(const PredicateDecl& o) const {
    return name == o.name && arg_types == o.arg_types && closed_world == o.closed_world;
  }
};

// As parsed: a conjunction body implying a head that is either a disjunction
// or a conjunction (the latter splits into one clause per conjunct).
// A bare clause parses with an empty body.
struct ParsedFormula {
  Weight weight;
  std::vector<Literal> body;
  std::vector<Literal> head;
  bool head_conjunction = false;
  std::vector<std::string> existential_vars;

  bool operator==(const ParsedFormula&) const = default;
};

struct ClausalFormula {
  std::vector<Literal> literals;
  Weight weight;
  std::vector<std::string> existential_vars;
  int source_id = -1;
};

struct MLNProgram {
  std::vector<PredicateDecl> predicates;
  std::vector<ParsedFormula> formulas;
  SymbolPool constants;
  DomainCatalog domains;

  int predicate_index(std::string_view name) const {
    for (size_t i = 0; i < predicates.size(); ++i)
      if (predicates[i].name == name) return static_cast<int>(i);
    return -1;
  }
};

struct EvidenceEntry {
  int pred = -1;
  std::vector<Sym> args;
  bool truth = true;
};

struct EvidenceSet {
  std::vector<EvidenceEntry> entries;
};

std::string format_weight(double v);
std::string to_string(const Term& t);
std::string to_string(const Literal& lit, const MLNProgram& prog);
std::string to_string(const ParsedFormula& f, const MLNProgram& prog);
std::string to_string(const ClausalFormula& f, const MLNProgram& prog);
std::string print_program(const MLNProgram& prog);

// Structural comparison used by the print/re-parse round trip. Compares
// declarations, domain contents and formulas by name, not by interned id.
bool structurally_equal(const MLNProgram& a, const MLNProgram& b);

}  // namespace mlnmap
