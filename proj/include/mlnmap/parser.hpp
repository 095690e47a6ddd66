#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mlnmap/ast.hpp"

namespace mlnmap {

struct ParseError : Error {
  int line = 0;
  int col = 0;
  ParseError(const std::string& msg, int line_, int col_)
      : Error("line " + std::to_string(line_) + ":" + std::to_string(col_) + ": " + msg),
        line(line_),
        col(col_) {}
};

// Program text grammar (normative; see README for the full description):
//   // comment until end of line
//   domain Name = {C1, C2, ...}
//   Pred(Type1, ..., TypeK)        declaration; leading '*' marks closed-world
//   <weight> <formula>             soft rule, weight is a real number
//   <formula> .                    hard rule (weight +infinity)
//   <formula> !.                   hard-negated rule (weight -infinity)
// A formula is either "body => head" (body: comma-separated conjunction;
// head: 'v'-separated disjunction or comma-separated conjunction) or a bare
// 'v'-separated clause. "EXIST x, y" before the head/clause binds existential
// variables. Identifiers starting lowercase are variables; uppercase, digits
// or 'quoted' tokens are constants. t1 = t2 and t1 != t2 are equality literals.
MLNProgram parse_program(std::string_view text);

// Evidence: one ground atom per line, '!' prefix for false, e.g.
//   wrote(Joe, P1)
//   !cat(P9, AI)
// Constants are registered into the domains of the predicate's argument types.
EvidenceSet parse_evidence(std::string_view text, MLNProgram& prog);

std::vector<ClausalFormula> to_clausal(const ParsedFormula& f, int source_id);
std::vector<ClausalFormula> to_clausal(const MLNProgram& prog);

}  // namespace mlnmap
