#pragma once

// Random MLN instance generator shared by the grounder tests and the
// acceptance checks. Emits program/evidence text so every instance also
// passes through the parser.

#include <random>
#include <string>
#include <vector>

namespace testutil {

struct RandomInstance {
  std::string program;
  std::string evidence;
};

inline RandomInstance random_instance(std::mt19937_64& rng, int max_preds = 4,
                                      int max_consts = 6, int max_formulas = 5) {
  auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<unsigned>(n)); };

  int ndom = 1 + pick(2);
  int total_consts = 2 + pick(max_consts - 1);
  std::vector<std::vector<std::string>> dom_consts(ndom);
  for (int c = 0; c < total_consts; ++c) {
    int d = (c < ndom) ? c : pick(ndom);  // every domain gets at least one
    dom_consts[d].push_back("K" + std::to_string(c));
  }

  std::string prog;
  for (int d = 0; d < ndom; ++d) {
    prog += "domain D" + std::to_string(d) + " = {";
    for (size_t i = 0; i < dom_consts[d].size(); ++i) {
      if (i) prog += ", ";
      prog += dom_consts[d][i];
    }
    prog += "}\n";
  }

  int npred = 1 + pick(max_preds);
  std::vector<int> arity(npred), ptype1(npred), ptype2(npred);
  std::vector<bool> closed(npred);
  for (int p = 0; p < npred; ++p) {
    arity[p] = 1 + pick(2);
    ptype1[p] = pick(ndom);
    ptype2[p] = pick(ndom);
    closed[p] = pick(3) == 0;
    prog += std::string(closed[p] ? "*" : "") + "p" + std::to_string(p) + "(D" +
            std::to_string(ptype1[p]);
    if (arity[p] == 2) prog += ", D" + std::to_string(ptype2[p]);
    prog += ")\n";
  }

  int nform = 1 + pick(max_formulas);
  for (int f = 0; f < nform; ++f) {
    // variables used so far in this formula, by domain
    std::vector<std::vector<std::string>> vars(ndom);
    int next_var = 0;
    auto arg_for = [&](int ty) -> std::string {
      int r = pick(5);
      if (r <= 1) return dom_consts[ty][pick(static_cast<int>(dom_consts[ty].size()))];
      if (r <= 3 && !vars[ty].empty())
        return vars[ty][pick(static_cast<int>(vars[ty].size()))];
      std::string v = "v" + std::to_string(next_var++);
      vars[ty].push_back(v);
      return v;
    };

    int nlit = 1 + pick(3);
    std::string body;
    for (int l = 0; l < nlit; ++l) {
      if (l) body += " v ";
      int p = pick(npred);
      if (pick(3) == 0) body += "!";
      body += "p" + std::to_string(p) + "(" + arg_for(ptype1[p]);
      if (arity[p] == 2) body += ", " + arg_for(ptype2[p]);
      body += ")";
    }

    bool used_equality = false;
    for (int d = 0; d < ndom && !used_equality; ++d)
      if (vars[d].size() >= 2 && pick(4) == 0) {
        body += std::string(" v ") + vars[d][0] + (pick(2) ? " != " : " = ") + vars[d][1];
        used_equality = true;
      }

    std::string prefix;
    if (!used_equality && next_var > 0 && pick(6) == 0)
      prefix = "EXIST v" + std::to_string(pick(next_var)) + " ";

    int wr = pick(8);
    if (wr == 0)
      prog += prefix + body + " .\n";
    else if (wr == 1)
      prog += prefix + body + " !.\n";
    else {
      static const char* weights[] = {"-2", "-1", "-0.5", "0.5", "1", "1.5", "2"};
      prog += std::string(weights[pick(7)]) + " " + prefix + body + "\n";
    }
  }

  // evidence: walk the full tuple space once so no atom repeats
  std::string ev;
  for (int p = 0; p < npred; ++p) {
    const auto& c1 = dom_consts[ptype1[p]];
    if (arity[p] == 1) {
      for (const auto& a : c1)
        if (pick(4) == 0) {
          bool truth = closed[p] ? pick(8) != 0 : pick(2) == 0;
          ev += std::string(truth ? "" : "!") + "p" + std::to_string(p) + "(" + a + ")\n";
        }
    } else {
      const auto& c2 = dom_consts[ptype2[p]];
      for (const auto& a : c1)
        for (const auto& b : c2)
          if (pick(4) == 0) {
            bool truth = closed[p] ? pick(8) != 0 : pick(2) == 0;
            ev += std::string(truth ? "" : "!") + "p" + std::to_string(p) + "(" + a + ", " + b +
                  ")\n";
          }
    }
  }
  return {prog, ev};
}

}  // namespace testutil
