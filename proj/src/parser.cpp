#include "mlnmap/parser.hpp"

#include <cctype>
#include <cstdlib>
#include <map>

namespace mlnmap {

namespace {

enum class Tok {
  Ident,
  Quoted,
  Number,
  LParen,
  RParen,
  LBrace,
  RBrace,
  Comma,
  Eq,
  Neq,
  Implies,
  Dot,
  BangDot,
  Bang,
  Star,
  End
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  int col = 0;
};

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

// Lexes one line; comments were already stripped.
std::vector<Token> lex_line(std::string_view s, int line_no) {
  std::vector<Token> out;
  size_t i = 0;
  auto err = [&](const std::string& m, size_t at) { throw ParseError(m, line_no, static_cast<int>(at + 1)); };
  while (i < s.size()) {
    char c = s[i];
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
      continue;
    }
    int col = static_cast<int>(i + 1);
    if (is_ident_start(c)) {
      size_t j = i;
      while (j < s.size() && is_ident_char(s[j])) ++j;
      out.push_back({Tok::Ident, std::string(s.substr(i, j - i)), col});
      i = j;
    } else if (is_digit(c) || ((c == '-' || c == '+') && i + 1 < s.size() && is_digit(s[i + 1]))) {
      size_t j = i + 1;
      while (j < s.size() && (is_digit(s[j]) || s[j] == '.' || s[j] == 'e' || s[j] == 'E' ||
                              ((s[j] == '+' || s[j] == '-') && (s[j - 1] == 'e' || s[j - 1] == 'E'))))
        ++j;
      // A trailing '.' belongs to the rule terminator, not the number.
      if (s[j - 1] == '.' && (j >= s.size() || !is_digit(s[j]))) --j;
      bool all_digits = true;
      for (size_t k = i; k < j; ++k)
        if (!is_digit(s[k])) all_digits = false;
      if (all_digits && j < s.size() && is_ident_start(s[j])) {
        // Digit-leading constant like 9X: fold the whole run into one token.
        while (j < s.size() && is_ident_char(s[j])) ++j;
        out.push_back({Tok::Ident, std::string(s.substr(i, j - i)), col});
      } else {
        out.push_back({Tok::Number, std::string(s.substr(i, j - i)), col});
      }
      i = j;
    } else if (c == '\'') {
      size_t j = s.find('\'', i + 1);
      if (j == std::string_view::npos) err("unterminated quoted constant", i);
      out.push_back({Tok::Quoted, std::string(s.substr(i + 1, j - i - 1)), col});
      i = j + 1;
    } else if (c == '(') {
      out.push_back({Tok::LParen, "(", col});
      ++i;
    } else if (c == ')') {
      out.push_back({Tok::RParen, ")", col});
      ++i;
    } else if (c == '{') {
      out.push_back({Tok::LBrace, "{", col});
      ++i;
    } else if (c == '}') {
      out.push_back({Tok::RBrace, "}", col});
      ++i;
    } else if (c == ',') {
      out.push_back({Tok::Comma, ",", col});
      ++i;
    } else if (c == '=') {
      if (i + 1 < s.size() && s[i + 1] == '>') {
        out.push_back({Tok::Implies, "=>", col});
        i += 2;
      } else {
        out.push_back({Tok::Eq, "=", col});
        ++i;
      }
    } else if (c == '!') {
      if (i + 1 < s.size() && s[i + 1] == '=') {
        out.push_back({Tok::Neq, "!=", col});
        i += 2;
      } else if (i + 1 < s.size() && s[i + 1] == '.') {
        out.push_back({Tok::BangDot, "!.", col});
        i += 2;
      } else {
        out.push_back({Tok::Bang, "!", col});
        ++i;
      }
    } else if (c == '.') {
      out.push_back({Tok::Dot, ".", col});
      ++i;
    } else if (c == '*') {
      out.push_back({Tok::Star, "*", col});
      ++i;
    } else {
      err(std::string("unexpected character '") + c + "'", i);
    }
  }
  out.push_back({Tok::End, "", static_cast<int>(s.size() + 1)});
  return out;
}

std::string_view strip_comment(std::string_view line) {
  bool quoted = false;
  for (size_t i = 0; i + 1 < line.size() || i < line.size(); ++i) {
    if (i >= line.size()) break;
    char c = line[i];
    if (c == '\'') quoted = !quoted;
    if (!quoted && c == '/' && i + 1 < line.size() && line[i + 1] == '/')
      return line.substr(0, i);
  }
  return line;
}

bool variable_token(const Token& t) {
  return t.kind == Tok::Ident && !t.text.empty() &&
         std::islower(static_cast<unsigned char>(t.text[0]));
}
bool constant_token(const Token& t) {
  if (t.kind == Tok::Quoted || t.kind == Tok::Number) return true;
  return t.kind == Tok::Ident && !t.text.empty() &&
         !std::islower(static_cast<unsigned char>(t.text[0]));
}

struct LineParser {
  const std::vector<Token>& toks;
  size_t pos = 0;
  int line;
  MLNProgram& prog;

  const Token& cur() const { return toks[pos]; }
  const Token& peek(size_t k = 1) const {
    return toks[std::min(pos + k, toks.size() - 1)];
  }
  [[noreturn]] void fail(const std::string& m) const { throw ParseError(m, line, cur().col); }
  Token expect(Tok k, const char* what) {
    if (cur().kind != k) fail(std::string("expected ") + what);
    return toks[pos++];
  }
  bool accept(Tok k) {
    if (cur().kind == k) {
      ++pos;
      return true;
    }
    return false;
  }

  Term parse_term() {
    const Token& t = cur();
    if (variable_token(t)) {
      ++pos;
      return Term{true, t.text, -1};
    }
    if (constant_token(t)) {
      ++pos;
      return Term{false, t.text, prog.constants.intern(t.text)};
    }
    fail("expected a variable or constant");
  }

  // Registers a constant into the domain of the predicate argument it fills.
  void register_constant(const Term& t, int pred, size_t arg) {
    if (t.is_variable) return;
    TypeId ty = prog.predicates[static_cast<size_t>(pred)].type_ids[arg];
    prog.domains.add_constant(ty, t.sym, prog.constants);
  }

  Literal parse_literal() {
    bool neg = accept(Tok::Bang);
    // Equality: term (=|!=) term.
    if ((variable_token(cur()) || constant_token(cur())) &&
        (peek().kind == Tok::Eq || peek().kind == Tok::Neq)) {
      Literal lit;
      lit.equality = true;
      lit.args.push_back(parse_term());
      if (accept(Tok::Neq)) lit.negated = !neg;
      else {
        expect(Tok::Eq, "'='");
        lit.negated = neg;
      }
      lit.args.push_back(parse_term());
      return lit;
    }
    const Token& name = cur();
    if (name.kind != Tok::Ident) fail("expected a literal");
    int pred = prog.predicate_index(name.text);
    if (pred < 0) fail("undeclared predicate '" + name.text + "'");
    ++pos;
    expect(Tok::LParen, "'('");
    Literal lit;
    lit.pred = pred;
    lit.negated = neg;
    const auto& decl = prog.predicates[static_cast<size_t>(pred)];
    do {
      lit.args.push_back(parse_term());
    } while (accept(Tok::Comma));
    expect(Tok::RParen, "')'");
    if (lit.args.size() != decl.arg_types.size())
      fail("predicate '" + decl.name + "' expects " + std::to_string(decl.arg_types.size()) +
           " arguments, got " + std::to_string(lit.args.size()));
    for (size_t i = 0; i < lit.args.size(); ++i) register_constant(lit.args[i], pred, i);
    return lit;
  }

  std::vector<std::string> parse_exist_vars() {
    std::vector<std::string> vars;
    if (!(cur().kind == Tok::Ident && (cur().text == "EXIST" || cur().text == "Exist")))
      return vars;
    ++pos;
    for (;;) {
      if (!variable_token(cur())) fail("expected an existential variable");
      vars.push_back(cur().text);
      ++pos;
      if (cur().kind == Tok::Comma && variable_token(peek()) && peek(2).kind != Tok::LParen) {
        ++pos;
        continue;
      }
      break;
    }
    return vars;
  }

  ParsedFormula parse_formula(Weight explicit_weight, bool has_weight) {
    ParsedFormula f;
    std::vector<std::string> exist_front = parse_exist_vars();
    std::vector<Literal> first;
    first.push_back(parse_literal());
    bool conj = false, disj = false;
    for (;;) {
      if (accept(Tok::Comma)) {
        conj = true;
        first.push_back(parse_literal());
      } else if (cur().kind == Tok::Ident && cur().text == "v") {
        ++pos;
        disj = true;
        first.push_back(parse_literal());
      } else {
        break;
      }
      if (conj && disj) fail("cannot mix ',' and 'v' in the same group");
    }
    if (accept(Tok::Implies)) {
      if (disj) fail("implication body must be a conjunction");
      if (!exist_front.empty()) fail("existential quantifier is only supported in the head");
      f.body = std::move(first);
      f.existential_vars = parse_exist_vars();
      f.head.push_back(parse_literal());
      bool hconj = false, hdisj = false;
      for (;;) {
        if (accept(Tok::Comma)) {
          hconj = true;
          f.head.push_back(parse_literal());
        } else if (cur().kind == Tok::Ident && cur().text == "v") {
          ++pos;
          hdisj = true;
          f.head.push_back(parse_literal());
        } else {
          break;
        }
        if (hconj && hdisj) fail("cannot mix ',' and 'v' in the same group");
      }
      f.head_conjunction = hconj;
      if (hconj && !f.existential_vars.empty())
        fail("existential quantifier over a conjunction is outside the supported fragment");
    } else {
      if (conj) fail("a conjunction needs '=>' (or use 'v' for a clause)");
      f.head = std::move(first);
      f.existential_vars = std::move(exist_front);
      f.head_conjunction = false;
    }
    if (accept(Tok::Dot)) {
      if (has_weight) fail("a weighted rule cannot end with '.'");
      f.weight = Weight::hard();
    } else if (accept(Tok::BangDot)) {
      if (has_weight) fail("a weighted rule cannot end with '!.'");
      f.weight = Weight::hard_negated();
    } else {
      if (!has_weight) fail("rule needs a leading weight or a '.' / '!.' terminator");
      f.weight = explicit_weight;
    }
    if (cur().kind != Tok::End) fail("unexpected trailing tokens");
    return f;
  }
};

bool looks_like_declaration(const std::vector<Token>& t) {
  size_t i = 0;
  if (t[i].kind == Tok::Star) ++i;
  if (t[i].kind != Tok::Ident) return false;
  ++i;
  if (t[i].kind != Tok::LParen) return false;
  ++i;
  for (;;) {
    if (t[i].kind != Tok::Ident) return false;
    ++i;
    if (t[i].kind == Tok::Comma) {
      ++i;
      continue;
    }
    break;
  }
  if (t[i].kind != Tok::RParen) return false;
  return t[i + 1].kind == Tok::End;
}

}  // namespace

MLNProgram parse_program(std::string_view text) {
  MLNProgram prog;
  int line_no = 0;
  size_t start = 0;
  while (start <= text.size()) {
    size_t nl = text.find('\n', start);
    std::string_view raw =
        text.substr(start, nl == std::string_view::npos ? text.size() - start : nl - start);
    start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    std::string_view line = strip_comment(raw);
    auto toks = lex_line(line, line_no);
    if (toks[0].kind == Tok::End) continue;

    if (toks[0].kind == Tok::Ident && toks[0].text == "domain") {
      LineParser p{toks, 1, line_no, prog};
      Token name = p.expect(Tok::Ident, "domain name");
      p.expect(Tok::Eq, "'='");
      p.expect(Tok::LBrace, "'{'");
      TypeId ty = prog.domains.add_type(name.text);
      if (!p.accept(Tok::RBrace)) {
        do {
          if (!constant_token(p.cur()))
            p.fail("expected a constant (uppercase, digit-leading, or quoted)");
          Sym s = prog.constants.intern(p.cur().text);
          ++p.pos;
          prog.domains.add_constant(ty, s, prog.constants);
        } while (p.accept(Tok::Comma));
        p.expect(Tok::RBrace, "'}'");
      }
      if (p.cur().kind != Tok::End) p.fail("unexpected trailing tokens");
      continue;
    }

    if (looks_like_declaration(toks)) {
      LineParser p{toks, 0, line_no, prog};
      PredicateDecl decl;
      decl.closed_world = p.accept(Tok::Star);
      decl.name = p.expect(Tok::Ident, "predicate name").text;
      if (prog.predicate_index(decl.name) >= 0) p.fail("duplicate predicate '" + decl.name + "'");
      p.expect(Tok::LParen, "'('");
      do {
        Token ty = p.expect(Tok::Ident, "type name");
        decl.arg_types.push_back(ty.text);
        decl.type_ids.push_back(prog.domains.add_type(ty.text));
      } while (p.accept(Tok::Comma));
      p.expect(Tok::RParen, "')'");
      prog.predicates.push_back(std::move(decl));
      continue;
    }

    // Rule line: optional leading weight, then a formula.
    LineParser p{toks, 0, line_no, prog};
    bool has_weight = toks[0].kind == Tok::Number;
    Weight w;
    if (has_weight) {
      w = Weight::soft(std::strtod(toks[0].text.c_str(), nullptr));
      ++p.pos;
    }
    prog.formulas.push_back(p.parse_formula(w, has_weight));
  }
  return prog;
}

EvidenceSet parse_evidence(std::string_view text, MLNProgram& prog) {
  EvidenceSet ev;
  std::map<std::pair<int, std::vector<Sym>>, bool> seen;
  int line_no = 0;
  size_t start = 0;
  while (start <= text.size()) {
    size_t nl = text.find('\n', start);
    std::string_view raw =
        text.substr(start, nl == std::string_view::npos ? text.size() - start : nl - start);
    start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    std::string_view line = strip_comment(raw);
    auto toks = lex_line(line, line_no);
    if (toks[0].kind == Tok::End) continue;

    LineParser p{toks, 0, line_no, prog};
    bool truth = !p.accept(Tok::Bang);
    Token name = p.expect(Tok::Ident, "predicate name");
    int pred = prog.predicate_index(name.text);
    if (pred < 0) p.fail("unknown predicate '" + name.text + "'");
    const auto& decl = prog.predicates[static_cast<size_t>(pred)];
    p.expect(Tok::LParen, "'('");
    EvidenceEntry entry;
    entry.pred = pred;
    entry.truth = truth;
    do {
      if (!constant_token(p.cur())) p.fail("non-constant argument in evidence");
      Sym s = prog.constants.intern(p.cur().text);
      ++p.pos;
      entry.args.push_back(s);
    } while (p.accept(Tok::Comma));
    p.expect(Tok::RParen, "')'");
    if (p.cur().kind != Tok::End) p.fail("unexpected trailing tokens");
    if (entry.args.size() != decl.arg_types.size())
      p.fail("predicate '" + decl.name + "' expects " + std::to_string(decl.arg_types.size()) +
             " arguments");
    for (size_t i = 0; i < entry.args.size(); ++i)
      prog.domains.add_constant(decl.type_ids[i], entry.args[i], prog.constants);

    auto key = std::make_pair(entry.pred, entry.args);
    auto it = seen.find(key);
    if (it != seen.end()) {
      if (it->second != entry.truth)
        p.fail("conflicting evidence for " + decl.name);
      continue;  // duplicate line, single entry
    }
    seen.emplace(std::move(key), entry.truth);
    ev.entries.push_back(std::move(entry));
  }
  return ev;
}

std::vector<ClausalFormula> to_clausal(const ParsedFormula& f, int source_id) {
  std::vector<Literal> base;
  base.reserve(f.body.size());
  for (const Literal& l : f.body) {
    Literal neg = l;
    neg.negated = !neg.negated;
    base.push_back(std::move(neg));
  }
  std::vector<ClausalFormula> out;
  if (f.head_conjunction && f.head.size() > 1) {
    if (!f.existential_vars.empty())
      throw Error("existential quantifier over a conjunction is outside the supported fragment");
    for (const Literal& h : f.head) {
      ClausalFormula c;
      c.literals = base;
      c.literals.push_back(h);
      c.weight = f.weight;
      c.source_id = source_id;
      out.push_back(std::move(c));
    }
  } else {
    ClausalFormula c;
    c.literals = base;
    for (const Literal& h : f.head) c.literals.push_back(h);
    c.weight = f.weight;
    c.existential_vars = f.existential_vars;
    c.source_id = source_id;
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<ClausalFormula> to_clausal(const MLNProgram& prog) {
  std::vector<ClausalFormula> out;
  for (size_t i = 0; i < prog.formulas.size(); ++i) {
    auto cs = to_clausal(prog.formulas[i], static_cast<int>(i));
    for (auto& c : cs) out.push_back(std::move(c));
  }
  return out;
}

}  // namespace mlnmap
