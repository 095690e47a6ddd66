#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mlnmap/oracle.hpp"
#include "mlnmap/pipeline.hpp"

namespace py = pybind11;
using namespace mlnmap;

namespace {

RunConfig make_config(const std::string& program, const std::string& evidence,
                      const std::string& out, std::uint64_t flips, std::uint64_t seed,
                      int workers, const std::string& partition, const std::string& ground,
                      std::uint64_t budget_bytes, int rounds) {
  RunConfig cfg;
  cfg.program_path = program;
  cfg.evidence_path = evidence;
  cfg.out_path = out;
  cfg.flips = flips;
  cfg.seed = seed;
  cfg.workers = workers;
  cfg.budget_bytes = budget_bytes;
  cfg.rounds = rounds;
  if (partition == "off") cfg.mode = PartitionMode::Off;
  else if (partition == "components") cfg.mode = PartitionMode::Components;
  else if (partition == "full") cfg.mode = PartitionMode::Full;
  else throw Error("unknown partition mode: " + partition);
  if (ground == "lazy") cfg.ground = GroundMode::Lazy;
  else if (ground == "full") cfg.ground = GroundMode::Full;
  else throw Error("unknown ground mode: " + ground);
  return cfg;
}

py::dict run_py(const std::string& program, const std::string& evidence,
                const std::string& out, std::uint64_t flips, std::uint64_t seed, int workers,
                const std::string& partition, const std::string& ground,
                std::uint64_t budget_bytes, int rounds) {
  RunReport rep = run(make_config(program, evidence, out, flips, seed, workers, partition,
                                  ground, budget_bytes, rounds));
  py::dict d;
  d["hard_cost"] = rep.cost.hard;
  d["soft_cost"] = rep.cost.soft;
  d["atoms"] = rep.atoms;
  d["clauses"] = rep.clauses;
  d["query_atoms"] = rep.query_atoms;
  d["true_atoms"] = rep.true_atoms;
  d["components"] = rep.component_count;
  d["partitions"] = rep.partition_count;
  d["batches"] = rep.batch_count;
  d["ground_iterations"] = rep.ground_iterations;
  d["summary"] = rep.summary;
  return d;
}

py::dict oracle_py(const std::string& program, const std::string& evidence,
                   size_t max_query_atoms) {
  RunConfig cfg;
  cfg.program_path = program;
  cfg.evidence_path = evidence;
  OracleRun r = oracle_run(cfg, max_query_atoms);
  py::dict d;
  d["hard_cost"] = r.cost.hard;
  d["soft_cost"] = r.cost.soft;
  d["true_atoms"] = r.true_atoms;
  d["query_atoms"] = r.query_atoms;
  d["clauses"] = r.clauses;
  return d;
}

// Grounds program/evidence given as text and returns the canonical clause
// strings, handy for quick inspection.
std::vector<std::string> ground_text(const std::string& program_text,
                                     const std::string& evidence_text, bool lazy) {
  MLNProgram prog = parse_program(program_text);
  EvidenceSet ev = parse_evidence(evidence_text, prog);
  AtomStore store = bulk_load(prog, ev);
  auto clausal = to_clausal(prog);
  GroundingResult g = lazy ? active_closure(clausal, prog, store)
                           : ground_full(clausal, prog, store);
  auto set = canonical_clause_set(g.table, store);
  return {set.begin(), set.end()};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "MAP inference engine for weighted first-order rule programs";
  m.def("run", &run_py, py::arg("program"), py::arg("evidence") = "", py::arg("out"),
        py::arg("flips") = 100000, py::arg("seed") = 1, py::arg("workers") = 1,
        py::arg("partition") = "components", py::arg("ground") = "lazy",
        py::arg("budget_bytes") = 64ull << 20, py::arg("rounds") = 3,
        "Ground the program and search for a least-cost world; writes the world file.");
  m.def("oracle", &oracle_py, py::arg("program"), py::arg("evidence") = "",
        py::arg("max_query_atoms") = 20,
        "Exhaustive reference result over the same inputs (small instances only).");
  m.def("ground_text", &ground_text, py::arg("program_text"), py::arg("evidence_text") = "",
        py::arg("lazy") = true, "Ground inline text and return canonical clause strings.");
  m.def("generate_example1", &generate_example1, py::arg("n"), py::arg("program_path"),
        py::arg("evidence_path"), "Write the n-block benchmark program and evidence files.");

  py::register_exception<ParseError>(m, "ParseError");
  py::register_exception<BudgetError>(m, "BudgetError");
  py::register_exception<IoError>(m, "IoError");
}
