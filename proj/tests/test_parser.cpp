#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>

#include "mlnmap/parser.hpp"

using namespace mlnmap;

static const char* kDesk = R"(
// bibliography example
domain PaperId = {P1, P2, P3}
domain Author = {Joe, Jake}
domain Category = {DB, Networking}
domain Url = {}

*wrote(Author, PaperId)
*refers(PaperId, PaperId)
cat(PaperId, Category)
paper(PaperId, Url)

cat(p, c1), cat(p, c2) => c1 = c2 .
1 wrote(x, p1), wrote(x, p2), cat(p1, c) => cat(p2, c)
2 cat(p1, c), refers(p1, p2) => cat(p2, c)
paper(p, u) => EXIST x wrote(x, p) .
-1 cat(p, Networking)
)";

TEST_CASE("desk program parses with expected shape") {
  MLNProgram prog = parse_program(kDesk);
  REQUIRE(prog.predicates.size() == 4);
  CHECK(prog.predicates[0].name == "wrote");
  CHECK(prog.predicates[0].closed_world);
  CHECK(!prog.predicates[2].closed_world);
  CHECK(prog.predicates[2].arg_types == std::vector<std::string>{"PaperId", "Category"});

  REQUIRE(prog.formulas.size() == 5);
  CHECK(prog.formulas[0].weight.tier == WeightTier::Hard);
  CHECK(prog.formulas[1].weight == Weight::soft(1));
  CHECK(prog.formulas[4].weight == Weight::soft(-1));
  CHECK(prog.formulas[3].existential_vars == std::vector<std::string>{"x"});

  TypeId paper_t = prog.domains.type_id("PaperId");
  REQUIRE(paper_t >= 0);
  CHECK(prog.domains.constants(paper_t).size() == 3);
  CHECK(prog.domains.constants(prog.domains.type_id("Url")).empty());
}

TEST_CASE("terms classify by leading character") {
  MLNProgram prog = parse_program(
      "domain D = {Abc, 'lower quoted', X9}\n"
      "p(D, D)\n"
      "1 p(x, Abc)\n"
      "1 p(y, 'lower quoted')\n");
  const auto& f0 = prog.formulas[0];
  REQUIRE(f0.head.size() == 1);
  CHECK(f0.head[0].args[0].is_variable);
  CHECK(f0.head[0].args[0].name == "x");
  CHECK(!f0.head[0].args[1].is_variable);
  const auto& f1 = prog.formulas[1];
  CHECK(!f1.head[0].args[1].is_variable);
  CHECK(f1.head[0].args[1].name == "lower quoted");
}

TEST_CASE("equality and inequality literals") {
  MLNProgram prog = parse_program(
      "domain D = {A, B}\n"
      "p(D, D)\n"
      "p(x, y) => x = y .\n"
      "p(x, y), x != y => p(y, x) .\n");
  const auto& eq = prog.formulas[0].head[0];
  CHECK(eq.equality);
  CHECK(!eq.negated);
  const auto& neq = prog.formulas[1].body[1];
  CHECK(neq.equality);
  CHECK(neq.negated);
}

TEST_CASE("clausal conversion negates the body") {
  MLNProgram prog = parse_program(
      "domain D = {A}\n"
      "p(D)\nq(D)\nr(D)\n"
      "1 p(x), q(x) => r(x)\n");
  auto cls = to_clausal(prog.formulas[0], 0);
  REQUIRE(cls.size() == 1);
  REQUIRE(cls[0].literals.size() == 3);
  CHECK(cls[0].literals[0].negated);
  CHECK(cls[0].literals[1].negated);
  CHECK(!cls[0].literals[2].negated);
  CHECK(cls[0].source_id == 0);
}

TEST_CASE("conjunction head splits into one clause per conjunct") {
  MLNProgram prog = parse_program(
      "domain D = {A}\n"
      "p(D)\nq(D)\nr(D)\n"
      "2 p(x) => q(x), r(x)\n");
  REQUIRE(prog.formulas[0].head_conjunction);
  auto cls = to_clausal(prog.formulas[0], 7);
  REQUIRE(cls.size() == 2);
  for (const auto& c : cls) {
    CHECK(c.weight == Weight::soft(2));  // full weight on each split clause
    CHECK(c.source_id == 7);
    REQUIRE(c.literals.size() == 2);
    CHECK(c.literals[0].negated);
  }
  CHECK(cls[0].literals[1].pred != cls[1].literals[1].pred);
}

TEST_CASE("disjunction head stays one clause") {
  MLNProgram prog = parse_program(
      "domain D = {A}\n"
      "p(D)\nq(D)\nr(D)\n"
      "2 p(x) => q(x) v r(x)\n");
  CHECK(!prog.formulas[0].head_conjunction);
  auto cls = to_clausal(prog.formulas[0], 0);
  REQUIRE(cls.size() == 1);
  CHECK(cls[0].literals.size() == 3);
}

TEST_CASE("existential over conjunction head is rejected") {
  CHECK_THROWS_AS(parse_program(
                      "domain D = {A}\n"
                      "p(D)\nq(D)\nr(D)\n"
                      "p(x) => EXIST y q(y), r(y) .\n"),
                  ParseError);
}

TEST_CASE("bare formula is a head-only clause") {
  MLNProgram prog = parse_program(
      "domain D = {A}\n"
      "p(D)\nq(D)\n"
      "-0.5 p(x) v q(x)\n");
  const auto& f = prog.formulas[0];
  CHECK(f.body.empty());
  CHECK(f.head.size() == 2);
  CHECK(f.weight == Weight::soft(-0.5));
}

TEST_CASE("hard negated marker") {
  MLNProgram prog = parse_program(
      "domain D = {A}\n"
      "p(D)\n"
      "p(x) !.\n");
  CHECK(prog.formulas[0].weight.tier == WeightTier::HardNegated);
}

TEST_CASE("negated literals inside formulas") {
  MLNProgram prog = parse_program(
      "domain D = {A}\n"
      "p(D)\nq(D)\n"
      "1 !p(x) => q(x)\n");
  CHECK(prog.formulas[0].body[0].negated);
  auto cls = to_clausal(prog.formulas[0], 0);
  // negated body literal flips back to positive in the clause
  CHECK(!cls[0].literals[0].negated);
  CHECK(!cls[0].literals[1].negated);
}

TEST_CASE("parse errors carry line and column") {
  try {
    parse_program("domain D = {A}\np(D)\n\n1 p(\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line == 4);
    CHECK(e.col > 0);
    CHECK(std::string(e.what()).find("line 4") != std::string::npos);
  }
}

TEST_CASE("error cases") {
  // unknown predicate
  CHECK_THROWS_AS(parse_program("domain D = {A}\np(D)\n1 z(x)\n"), ParseError);
  // arity mismatch
  CHECK_THROWS_AS(parse_program("domain D = {A}\np(D)\n1 p(x, y)\n"), ParseError);
  // a declaration may name a type with no domain line; it starts empty
  MLNProgram implicit = parse_program("p(Nope)\n");
  REQUIRE(implicit.domains.type_count() == 1);
  CHECK(implicit.domains.constants(0).empty());
  // missing weight and missing period
  CHECK_THROWS_AS(parse_program("domain D = {A}\np(D)\np(x)\n"), ParseError);
  // duplicate declaration
  CHECK_THROWS_AS(parse_program("domain D = {A}\np(D)\np(D)\n"), ParseError);
}

TEST_CASE("evidence parsing") {
  MLNProgram prog = parse_program(kDesk);
  EvidenceSet ev = parse_evidence(
      "wrote(Joe, P1)\n"
      "// a comment line\n"
      "wrote(Joe, P2)\n"
      "!cat(P3, Networking)\n"
      "\n"
      "refers(P1, P3)\n",
      prog);
  REQUIRE(ev.entries.size() == 4);
  CHECK(ev.entries[0].pred == prog.predicate_index("wrote"));
  CHECK(ev.entries[0].truth);
  CHECK(!ev.entries[3 - 1].truth);  // the cat line
  // constants resolved into the right domains
  TypeId author = prog.domains.type_id("Author");
  CHECK(prog.domains.contains(author, prog.constants.find("Joe")));
}

TEST_CASE("evidence registers new constants into domains") {
  MLNProgram prog = parse_program("domain D = {A}\n*p(D)\n1 p(x) v p(x)\n");
  parse_evidence("p(B)\np(C7)\n", prog);
  TypeId d = prog.domains.type_id("D");
  CHECK(prog.domains.constants(d).size() == 3);
}

TEST_CASE("evidence errors") {
  MLNProgram prog = parse_program("domain D = {A}\n*p(D)\nq(D)\n1 q(x) v q(x)\n");
  // variables are not allowed in evidence
  CHECK_THROWS_AS(parse_evidence("p(x)\n", prog), ParseError);
  // unknown predicate
  CHECK_THROWS_AS(parse_evidence("zz(A)\n", prog), ParseError);
  // arity
  CHECK_THROWS_AS(parse_evidence("p(A, A)\n", prog), ParseError);
}

TEST_CASE("print and reparse round trip") {
  MLNProgram prog = parse_program(kDesk);
  std::string text = print_program(prog);
  MLNProgram again = parse_program(text);
  CHECK(structurally_equal(prog, again));
  // and the printer is a fixpoint
  CHECK(print_program(again) == text);
}

TEST_CASE("round trip survives quoted and numeric constants") {
  MLNProgram prog = parse_program(
      "domain D = {A, 'odd name', 9X, B}\n"
      "p(D, D)\n"
      "1.25 p(x, 'odd name') => p(x, 9X)\n"
      "p(A, B) .\n");
  MLNProgram again = parse_program(print_program(prog));
  CHECK(structurally_equal(prog, again));
}

TEST_CASE("weight formatting") {
  CHECK(format_weight(1.0) == "1");
  CHECK(format_weight(-0.5) == "-0.5");
  CHECK(format_weight(1.25) == "1.25");
  CHECK(format_weight(1e-3) == "0.001");
}
