#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "mlnmap/mrf.hpp"
#include "mlnmap/partition.hpp"

namespace mlnmap {

struct SearchParams {
  std::uint64_t max_flips = 100000;
  std::uint32_t max_tries = 1;
  double noise = 0.5;  // probability of the random-walk branch
  std::uint64_t seed = 1;
  // Test hook: called per flip with (clause id, atom index).
  std::function<void(std::uint32_t, std::uint32_t)>* observer = nullptr;
};

struct TraceRow {
  double seconds = 0.0;
  std::uint64_t flips = 0;
  Cost best;
};

using Trace = std::vector<TraceRow>;

struct SearchResult {
  Assignment assignment;
  Cost cost;
  Trace trace;
  std::uint64_t flips = 0;
};

// Stochastic local search state with incremental cost bookkeeping. Exposed so
// partition-aware search can keep per-partition states alive across rounds.
class WalkState {
 public:
  WalkState(const Mrf& mrf, std::uint64_t seed);

  void random_init();                 // draws one bit per atom
  void set_assignment(const Assignment& a);
  void run(std::uint64_t flips, const SearchParams& p);  // appends to the trace

  const Assignment& assignment() const { return cur_; }
  const Assignment& best_assignment() const { return best_; }
  Cost current_cost() const { return cost_; }
  Cost best_cost() const { return best_cost_; }
  std::uint64_t flips() const { return flips_; }
  const Trace& trace() const { return trace_; }
  std::mt19937_64& rng() { return rng_; }

  // Swaps in a different (reduced) view of the same atoms; recomputes counters
  // and re-evaluates the stored best under the new clause set.
  void rebind(const Mrf& mrf, bool reeval_best);

 private:
  const Mrf* mrf_;
  std::mt19937_64 rng_;
  Assignment cur_, best_;
  std::vector<std::uint32_t> sat_count_;
  std::vector<std::uint32_t> violated_;      // violated clause ids, dense list
  std::vector<std::uint32_t> violated_pos_;  // clause id -> index in violated_ or npos
  Cost cost_, best_cost_;
  std::uint64_t flips_ = 0;
  Trace trace_;
  std::chrono::steady_clock::time_point start_;
  bool started_ = false;

  void recount();
  void flip(std::uint32_t atom);
  Cost cost_after_flip(std::uint32_t atom) const;
  void mark(std::uint32_t cid, bool violated_now);
  void note_best();
};

SearchResult walksat(const Mrf& mrf, const SearchParams& p);

// Budget split proportional to component size (floor, at least 1); each component
// runs independently with seed = params.seed XOR component id; bests are
// stitched back into one assignment.
SearchResult component_aware_walksat(const Mrf& mrf, const ComponentIndex& comps,
                                     std::uint64_t total_flips, const SearchParams& p);

// T rounds of block-coordinate search over the partitions in fixed order;
// frozen atoms act as constants, cut clauses reduce against them. Inner runs
// continue each partition's state (assignment, RNG, best) across rounds.
// per_partition_flips is the inner budget per partition per round. A custom
// sweep order (e.g. grouped by batch) may be supplied; default is partition id.
SearchResult gauss_seidel(const Mrf& mrf, const PartitionResult& parts, int rounds,
                          std::uint64_t per_partition_flips, const SearchParams& p,
                          const std::vector<std::uint32_t>* order = nullptr);

// Deterministic worker pool: item i goes to worker i % workers; results are
// collected by item index so the worker count never changes the outcome.
void parallel_round_robin(size_t items, int workers, const std::function<void(size_t)>& fn);

}  // namespace mlnmap
