#include "mlnmap/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <sstream>

#include "mlnmap/ast.hpp"
#include "mlnmap/oracle.hpp"
#include "mlnmap/partition.hpp"

namespace mlnmap {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("cannot read " + path);
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << content;
  if (!out) throw IoError("cannot write " + path);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt_seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", s);
  return buf;
}

}  // namespace

RunReport run(const RunConfig& cfg) {
  MLNProgram prog = parse_program(read_file(cfg.program_path));
  EvidenceSet ev;
  if (!cfg.evidence_path.empty()) ev = parse_evidence(read_file(cfg.evidence_path), prog);
  AtomStore store = bulk_load(prog, ev);
  std::vector<ClausalFormula> clausal = to_clausal(prog);

  GroundingOptions gopt;
  gopt.algorithm = cfg.join;
  gopt.existential_cap = cfg.existential_cap;
  gopt.explain = cfg.explain;

  auto tg0 = std::chrono::steady_clock::now();
  GroundingResult gr = cfg.ground == GroundMode::Lazy
                           ? active_closure(clausal, prog, store, gopt)
                           : ground_full(clausal, prog, store, gopt);
  double ground_seconds = seconds_since(tg0);

  std::string clauses_path =
      cfg.clauses_path.empty() ? cfg.out_path + ".clauses" : cfg.clauses_path;
  persist_clauses(gr.table, clauses_path);
  write_atom_dictionary(store, cfg.out_path + ".atoms");

  // The search working set comes back off disk so every run exercises the
  // persisted format.
  ClauseTable disk = load_clauses(clauses_path);
  Mrf mrf = build_mrf(disk, store);

  SearchParams params;
  params.max_flips = cfg.flips;
  params.max_tries = cfg.tries;
  params.noise = cfg.noise;
  params.seed = cfg.seed;

  std::uint64_t budget_units = cfg.budget_bytes / kBytesPerSizeUnit;

  RunReport rep;
  rep.atoms = static_cast<std::uint64_t>(store.max_aid());
  rep.clauses = disk.size();
  rep.ground_iterations = gr.iterations;
  rep.ground_seconds = ground_seconds;

  ComponentIndex comps = components(mrf);
  rep.component_count = comps.count;

  Assignment final_assignment(mrf.atom_count(), 0);
  Trace trace;
  bool oversize_warning = false;
  auto ts0 = std::chrono::steady_clock::now();

  if (mrf.clause_count() == 0) {
    rep.partition_count = 0;
    rep.batch_count = 0;
  } else if (cfg.mode == PartitionMode::Off) {
    SearchResult res = walksat(mrf, params);
    final_assignment = res.assignment;
    trace = res.trace;
    rep.partition_count = 1;
    rep.batch_count = 1;
  } else if (cfg.mode == PartitionMode::Components) {
    PartitionResult parts = partition(mrf, kNoBound);  // connected components
    auto batches = pack_batches(parts.parts, std::max<std::uint64_t>(budget_units, 1));
    rep.partition_count = parts.parts.size();
    rep.batch_count = batches.size();

    std::vector<Assignment> frag(parts.parts.size());
    std::vector<std::vector<std::uint32_t>> backs(parts.parts.size());
    for (const auto& batch : batches)
      parallel_round_robin(batch.size(), cfg.workers, [&](size_t i) {
        std::uint32_t pid = batch[i];
        SubMrf sub = project(mrf, comps, static_cast<std::int32_t>(pid));
        SearchParams q = params;
        q.seed = params.seed ^ pid;
        q.max_flips = std::max<std::uint64_t>(
            1, cfg.flips * sub.mrf.atom_count() / std::max<size_t>(mrf.atom_count(), 1));
        SearchResult r = walksat(sub.mrf, q);
        frag[pid] = std::move(r.assignment);
        backs[pid] = std::move(sub.atom_back);
      });
    for (size_t pid = 0; pid < parts.parts.size(); ++pid)
      for (size_t i = 0; i < backs[pid].size(); ++i)
        final_assignment[backs[pid][i]] = frag[pid][i];
  } else {  // PartitionMode::Full
    PartitionResult parts = partition(mrf, std::max<std::uint64_t>(budget_units, 1));
    oversize_warning = parts.oversize;
    std::uint64_t pack_budget = std::max<std::uint64_t>(budget_units, 1);
    if (parts.oversize)
      for (const auto& p : parts.parts) pack_budget = std::max(pack_budget, p.size_units);
    auto batches = pack_batches(parts.parts, pack_budget);
    rep.partition_count = parts.parts.size();
    rep.batch_count = batches.size();
    rep.cut_clauses = parts.cut.clauses.size();
    rep.cut_soft_weight = parts.cut.soft_weight;
    rep.cut_hard_count = parts.cut.hard_count;

    // Expected benefit of splitting: probe each component briefly, count the
    // ones the probe leaves unsatisfied.
    int n_hat = 0;
    for (std::int32_t c = 0; c < comps.count; ++c) {
      SubMrf sub = project(mrf, comps, c);
      SearchParams q = params;
      q.seed = params.seed ^ static_cast<std::uint64_t>(c);
      q.max_flips = 1000;
      q.max_tries = 1;
      if (!walksat(sub.mrf, q).cost.is_zero()) ++n_hat;
    }
    rep.w_estimate =
        estimate_gain(n_hat, cfg.flips, parts.cut.clauses.size(), mrf.clause_count());

    if (batches.size() == 1) {
      // Independent components run in parallel; a component split into
      // several partitions runs block-coordinate rounds over them.
      std::vector<std::vector<std::uint32_t>> comp_parts(
          static_cast<size_t>(comps.count));
      for (std::uint32_t pid = 0; pid < parts.parts.size(); ++pid) {
        std::int32_t c = comps.atom_comp[parts.parts[pid].atoms[0]];
        comp_parts[static_cast<size_t>(c)].push_back(pid);
      }
      std::vector<Assignment> frag(static_cast<size_t>(comps.count));
      std::vector<std::vector<std::uint32_t>> backs(static_cast<size_t>(comps.count));
      parallel_round_robin(static_cast<size_t>(comps.count), cfg.workers, [&](size_t c) {
        SubMrf sub = project(mrf, comps, static_cast<std::int32_t>(c));
        std::uint64_t comp_budget = std::max<std::uint64_t>(
            1, cfg.flips * sub.mrf.atom_count() / std::max<size_t>(mrf.atom_count(), 1));
        SearchParams q = params;
        q.seed = params.seed ^ static_cast<std::uint64_t>(c);
        const auto& pids = comp_parts[c];
        SearchResult r;
        if (pids.size() <= 1) {
          q.max_flips = comp_budget;
          r = walksat(sub.mrf, q);
        } else {
          // Restrict the partition result to this component, in local ids.
          std::vector<std::int32_t> local_atom(mrf.atom_count(), -1);
          for (size_t i = 0; i < sub.atom_back.size(); ++i)
            local_atom[sub.atom_back[i]] = static_cast<std::int32_t>(i);
          std::vector<std::int32_t> local_cid(mrf.clause_count(), -1);
          for (size_t i = 0; i < sub.clause_back.size(); ++i)
            local_cid[sub.clause_back[i]] = static_cast<std::int32_t>(i);
          PartitionResult local;
          local.atom_part.assign(sub.mrf.atom_count(), 0);
          for (size_t k = 0; k < pids.size(); ++k) {
            const Partition& gp = parts.parts[pids[k]];
            Partition lp;
            lp.size_units = gp.size_units;
            for (std::uint32_t a : gp.atoms) {
              lp.atoms.push_back(static_cast<std::uint32_t>(local_atom[a]));
              local.atom_part[static_cast<size_t>(local_atom[a])] =
                  static_cast<std::uint32_t>(k);
            }
            for (std::uint32_t cid : gp.clauses)
              lp.clauses.push_back(static_cast<std::uint32_t>(local_cid[cid]));
            local.parts.push_back(std::move(lp));
          }
          for (std::uint32_t cid : parts.cut.clauses)
            if (local_cid[cid] >= 0)
              local.cut.clauses.push_back(static_cast<std::uint32_t>(local_cid[cid]));
          std::uint64_t per = std::max<std::uint64_t>(
              1, comp_budget / (static_cast<std::uint64_t>(cfg.rounds) * pids.size()));
          r = gauss_seidel(sub.mrf, local, cfg.rounds, per, q);
        }
        frag[c] = std::move(r.assignment);
        backs[c] = std::move(sub.atom_back);
      });
      for (size_t c = 0; c < frag.size(); ++c)
        for (size_t i = 0; i < backs[c].size(); ++i)
          final_assignment[backs[c][i]] = frag[c][i];
    } else {
      // Several batches: one block-coordinate sweep over all partitions per
      // round, grouped so each batch's working set is in play together.
      std::vector<std::uint32_t> order;
      for (const auto& batch : batches)
        for (std::uint32_t pid : batch) order.push_back(pid);
      std::uint64_t per = std::max<std::uint64_t>(
          1, cfg.flips / (static_cast<std::uint64_t>(cfg.rounds) *
                          std::max<size_t>(parts.parts.size(), 1)));
      SearchResult res = gauss_seidel(mrf, parts, cfg.rounds, per, params, &order);
      final_assignment = res.assignment;
      trace = res.trace;
    }
  }

  rep.search_seconds = seconds_since(ts0);
  Cost search_cost = cost(mrf, final_assignment);
  rep.cost = search_cost + mrf.base_cost + Cost{gr.constant_hard, gr.constant_soft};
  if (trace.empty()) trace.push_back({rep.search_seconds, cfg.flips, search_cost});

  // World file: the true query atoms, one per line, in aid order.
  std::vector<std::int64_t> mrf_index(static_cast<size_t>(store.max_aid()) + 1, -1);
  for (size_t i = 0; i < mrf.atom_aid.size(); ++i)
    mrf_index[static_cast<size_t>(mrf.atom_aid[i])] = static_cast<std::int64_t>(i);
  std::string world;
  for (Aid aid = 1; aid <= store.max_aid(); ++aid) {
    if (store.truth(aid) != TruthValue::Unknown) continue;
    rep.query_atoms += 1;
    std::int64_t idx = mrf_index[static_cast<size_t>(aid)];
    if (idx >= 0 && final_assignment[static_cast<size_t>(idx)]) {
      world += store.atom_text(aid);
      world += '\n';
      rep.true_atoms += 1;
    }
  }
  write_file(cfg.out_path, world);

  if (!cfg.trace_path.empty()) {
    std::string csv = "elapsed_seconds,flips,hard_violations,soft_cost\n";
    for (const TraceRow& row : trace) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.6f", row.seconds);
      csv += buf;
      csv += ',' + std::to_string(row.flips) + ',' + std::to_string(row.best.hard) + ',' +
             format_weight(row.best.soft) + '\n';
    }
    write_file(cfg.trace_path, csv);
  }

  std::ostringstream s;
  s << "atoms " << rep.atoms << " (" << rep.query_atoms << " query), ground clauses "
    << rep.clauses;
  if (gr.constant_hard || gr.constant_soft != 0.0)
    s << " (+ constant hard " << gr.constant_hard << ", soft "
      << format_weight(gr.constant_soft) << ")";
  s << "\n";
  s << "grounding " << (cfg.ground == GroundMode::Lazy ? "lazy" : "full") << ", "
    << gr.iterations << (gr.iterations == 1 ? " pass" : " passes") << ", "
    << fmt_seconds(rep.ground_seconds) << "s, "
    << (cfg.join == JoinAlgorithm::Hash ? "hash join" : "nested-loop join") << "\n";
  if (cfg.explain)
    for (size_t i = 0; i < gr.per_formula.size(); ++i)
      s << "  formula " << i << ": " << gr.per_formula[i].plan << "\n";
  s << "components " << rep.component_count << ", partitions " << rep.partition_count
    << ", batches " << rep.batch_count << "\n";
  if (cfg.mode == PartitionMode::Full) {
    s << "cut " << rep.cut_clauses << " clauses (soft " << format_weight(rep.cut_soft_weight)
      << ", hard " << rep.cut_hard_count << "), estimated gain "
      << format_weight(rep.w_estimate) << "\n";
    if (oversize_warning)
      s << "warning: a clause exceeds the budget on its own; one partition is oversized\n";
  }
  s << "search "
    << (cfg.mode == PartitionMode::Off
            ? "plain"
            : cfg.mode == PartitionMode::Components ? "per-component" : "partition-aware")
    << ", " << cfg.flips << " flips budget, " << fmt_seconds(rep.search_seconds) << "s\n";
  s << "cost hard " << rep.cost.hard << ", soft " << format_weight(rep.cost.soft) << "\n";
  s << "true atoms " << rep.true_atoms << " of " << rep.query_atoms << " -> " << cfg.out_path
    << "\n";
  rep.summary = s.str();
  return rep;
}

void generate_example1(std::uint64_t n, const std::string& program_path,
                       const std::string& evidence_path) {
  std::string p = "domain Comp = {";
  for (std::uint64_t i = 1; i <= n; ++i) {
    if (i > 1) p += ", ";
    p += "C" + std::to_string(i);
  }
  p += "}\n\nx(Comp)\ny(Comp)\n\n";
  p += "1 x(i)\n";
  p += "1 y(i)\n";
  p += "-1 x(i) v y(i)\n";
  write_file(program_path, p);
  write_file(evidence_path, "");
}

OracleRun oracle_run(const RunConfig& cfg, size_t max_query_atoms) {
  MLNProgram prog = parse_program(read_file(cfg.program_path));
  EvidenceSet ev;
  if (!cfg.evidence_path.empty()) ev = parse_evidence(read_file(cfg.evidence_path), prog);
  AtomStore store = bulk_load(prog, ev);
  std::vector<ClausalFormula> clausal = to_clausal(prog);
  OracleGrounding g = oracle_ground_full(clausal, prog, store);
  OracleMap m = oracle_map(g.table, g.constant_hard, g.constant_soft, store, max_query_atoms);
  OracleRun r;
  r.cost = m.optimum;
  r.query_atoms = m.query_atoms;
  r.clauses = g.table.size();
  for (Aid aid : m.true_atoms) r.true_atoms.push_back(store.atom_text(aid));
  return r;
}

}  // namespace mlnmap
