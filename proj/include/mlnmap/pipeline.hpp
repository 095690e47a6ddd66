#pragma once

#include <cstdint>
#include <string>

#include "mlnmap/grounder.hpp"
#include "mlnmap/search.hpp"

namespace mlnmap {

enum class PartitionMode { Off, Components, Full };
enum class GroundMode { Lazy, Full };

struct RunConfig {
  std::string program_path;
  std::string evidence_path;  // may be empty
  std::string out_path;
  std::string trace_path;    // empty: no trace file
  std::string clauses_path;  // empty: "<out>.clauses"
  std::uint64_t budget_bytes = 64ull << 20;
  std::uint64_t flips = 1000000;
  std::uint64_t seed = 1;
  int workers = 1;
  PartitionMode mode = PartitionMode::Components;
  GroundMode ground = GroundMode::Lazy;
  int rounds = 3;  // block-coordinate sweeps in Full mode
  std::uint32_t tries = 1;
  double noise = 0.5;
  int existential_cap = 64;
  JoinAlgorithm join = JoinAlgorithm::Hash;
  bool explain = false;
};

struct RunReport {
  Cost cost;  // includes evidence-decided constant cost
  std::uint64_t atoms = 0;
  std::uint64_t clauses = 0;
  std::uint64_t query_atoms = 0;
  std::uint64_t true_atoms = 0;
  std::int32_t component_count = 0;
  std::uint64_t partition_count = 0;
  std::uint64_t batch_count = 0;
  std::uint64_t cut_clauses = 0;
  double cut_soft_weight = 0.0;
  std::uint64_t cut_hard_count = 0;
  double w_estimate = 0.0;
  int ground_iterations = 0;
  double ground_seconds = 0.0;
  double search_seconds = 0.0;
  std::string summary;
};

// Parse, load, ground, persist the clause table (plus the atom dictionary
// sidecar), search batch by batch, then write the world file: the true query
// atoms, one per line, in aid order.
RunReport run(const RunConfig& cfg);

// N independent two-atom blocks: soft unit clauses (X_i, 1), (Y_i, 1) and one
// negative clause (X_i v Y_i, -1). Writes program and evidence files.
void generate_example1(std::uint64_t n, const std::string& program_path,
                       const std::string& evidence_path);

struct OracleRun {
  Cost cost;
  std::vector<std::string> true_atoms;
  size_t query_atoms = 0;
  size_t clauses = 0;
};

// Exhaustive reference run over the same inputs (full grounding + world
// enumeration); practical only for small instances.
OracleRun oracle_run(const RunConfig& cfg, size_t max_query_atoms = 20);

}  // namespace mlnmap
