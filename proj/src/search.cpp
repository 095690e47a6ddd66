#include "mlnmap/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <mutex>
#include <thread>

namespace mlnmap {

namespace {

constexpr std::uint32_t kNoPos = std::numeric_limits<std::uint32_t>::max();

// Zero-weight clauses can never contribute cost, so they are never treated
// as violated.
bool clause_violated(const Weight& w, std::uint32_t sat) {
  if (w.tier == WeightTier::Soft && w.value == 0.0) return false;
  return w.positive_semantics() ? sat == 0 : sat > 0;
}

Cost clause_price(const Weight& w) {
  if (w.is_hard()) return {1, 0.0};
  return {0, std::abs(w.value)};
}

double rand01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

WalkState::WalkState(const Mrf& mrf, std::uint64_t seed) : mrf_(&mrf), rng_(seed) {
  cur_.assign(mrf.atom_count(), 0);
  best_ = cur_;
  recount();
  best_cost_ = cost_;
}

void WalkState::random_init() {
  for (auto& b : cur_) b = static_cast<std::uint8_t>(rng_() & 1);
  recount();
  best_ = cur_;
  best_cost_ = cost_;
  note_best();
}

void WalkState::set_assignment(const Assignment& a) {
  cur_ = a;
  recount();
  best_ = cur_;
  best_cost_ = cost_;
  note_best();
}

void WalkState::recount() {
  size_t m = mrf_->clause_count();
  sat_count_.assign(m, 0);
  violated_.clear();
  violated_pos_.assign(m, kNoPos);
  cost_ = {0, 0.0};
  for (size_t c = 0; c < m; ++c) {
    std::uint32_t sat = 0;
    for (std::int32_t lit : mrf_->lits(c)) {
      std::uint32_t atom = static_cast<std::uint32_t>((lit > 0 ? lit : -lit) - 1);
      if ((cur_[atom] != 0) == (lit > 0)) ++sat;
    }
    sat_count_[c] = sat;
    if (clause_violated(mrf_->clauses[c].weight, sat)) {
      mark(static_cast<std::uint32_t>(c), true);
      cost_ = cost_ + clause_price(mrf_->clauses[c].weight);
    }
  }
}

void WalkState::mark(std::uint32_t cid, bool violated_now) {
  std::uint32_t pos = violated_pos_[cid];
  if (violated_now) {
    if (pos != kNoPos) return;
    violated_pos_[cid] = static_cast<std::uint32_t>(violated_.size());
    violated_.push_back(cid);
  } else {
    if (pos == kNoPos) return;
    std::uint32_t last = violated_.back();
    violated_[pos] = last;
    violated_pos_[last] = pos;
    violated_.pop_back();
    violated_pos_[cid] = kNoPos;
  }
}

void WalkState::flip(std::uint32_t atom) {
  cur_[atom] ^= 1;
  auto begin = mrf_->adj_off[atom];
  auto end = mrf_->adj_off[atom + 1];
  for (std::uint32_t k = begin; k < end; ++k) {
    std::uint32_t cid = mrf_->adj_clause[k];
    const MrfClause& cl = mrf_->clauses[cid];
    bool now_true = false;
    for (std::int32_t lit : mrf_->lits(cl)) {
      std::uint32_t a = static_cast<std::uint32_t>((lit > 0 ? lit : -lit) - 1);
      if (a == atom) {
        now_true = (cur_[atom] != 0) == (lit > 0);
        break;
      }
    }
    std::uint32_t sat = sat_count_[cid] + (now_true ? 1u : -1u);
    sat_count_[cid] = sat;
    bool was = violated_pos_[cid] != kNoPos;
    bool is = clause_violated(cl.weight, sat);
    if (was != is) {
      Cost price = clause_price(cl.weight);
      if (is) {
        cost_ = cost_ + price;
      } else {
        cost_.hard -= price.hard;
        cost_.soft -= price.soft;
      }
      mark(cid, is);
    }
  }
}

Cost WalkState::cost_after_flip(std::uint32_t atom) const {
  std::int64_t dh = 0;
  double ds = 0.0;
  auto begin = mrf_->adj_off[atom];
  auto end = mrf_->adj_off[atom + 1];
  for (std::uint32_t k = begin; k < end; ++k) {
    std::uint32_t cid = mrf_->adj_clause[k];
    const MrfClause& cl = mrf_->clauses[cid];
    bool was_true = false;
    for (std::int32_t lit : mrf_->lits(cl)) {
      std::uint32_t a = static_cast<std::uint32_t>((lit > 0 ? lit : -lit) - 1);
      if (a == atom) {
        was_true = (cur_[atom] != 0) == (lit > 0);
        break;
      }
    }
    std::uint32_t sat = sat_count_[cid] + (was_true ? -1u : 1u);
    bool was = clause_violated(cl.weight, sat_count_[cid]);
    bool is = clause_violated(cl.weight, sat);
    if (was == is) continue;
    Cost price = clause_price(cl.weight);
    if (is) {
      dh += static_cast<std::int64_t>(price.hard);
      ds += price.soft;
    } else {
      dh -= static_cast<std::int64_t>(price.hard);
      ds -= price.soft;
    }
  }
  return {static_cast<std::uint64_t>(static_cast<std::int64_t>(cost_.hard) + dh),
          cost_.soft + ds};
}

void WalkState::note_best() {
  if (!started_) {
    started_ = true;
    start_ = std::chrono::steady_clock::now();
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  trace_.push_back({secs, flips_, best_cost_});
}

void WalkState::run(std::uint64_t flips, const SearchParams& p) {
  for (std::uint64_t i = 0; i < flips; ++i) {
    if (violated_.empty()) break;  // nothing left to repair
    std::uint32_t cid = violated_[rng_() % violated_.size()];
    auto lits = mrf_->lits(cid);
    std::uint32_t atom;
    if (rand01(rng_) <= p.noise) {
      std::int32_t lit = lits[rng_() % lits.size()];
      atom = static_cast<std::uint32_t>((lit > 0 ? lit : -lit) - 1);
    } else {
      atom = static_cast<std::uint32_t>((lits[0] > 0 ? lits[0] : -lits[0]) - 1);
      Cost best_after = cost_after_flip(atom);
      for (size_t j = 1; j < lits.size(); ++j) {
        std::uint32_t a = static_cast<std::uint32_t>((lits[j] > 0 ? lits[j] : -lits[j]) - 1);
        Cost after = cost_after_flip(a);
        if (after < best_after || (after == best_after && a < atom)) {
          atom = a;
          best_after = after;
        }
      }
    }
    if (p.observer) (*p.observer)(cid, atom);
    flip(atom);
    ++flips_;
    if (cost_ < best_cost_) {
      best_cost_ = cost_;
      best_ = cur_;
      note_best();
    }
  }
}

void WalkState::rebind(const Mrf& mrf, bool reeval_best) {
  mrf_ = &mrf;
  recount();
  if (reeval_best) {
    // The stored best was measured under the old clause set; rescore it and
    // let the current state take over if it is now better.
    best_cost_ = cost(mrf, best_);
    if (cost_ < best_cost_) {
      best_ = cur_;
      best_cost_ = cost_;
    }
  }
}

SearchResult walksat(const Mrf& mrf, const SearchParams& p) {
  SearchResult res;
  std::uint64_t flip_offset = 0;
  double secs_offset = 0.0;
  for (std::uint32_t t = 0; t < std::max<std::uint32_t>(p.max_tries, 1); ++t) {
    WalkState ws(mrf, p.seed + t);
    ws.random_init();
    ws.run(p.max_flips, p);
    bool better = t == 0 || ws.best_cost() < res.cost;
    if (better) {
      res.cost = ws.best_cost();
      res.assignment = ws.best_assignment();
    }
    for (const TraceRow& row : ws.trace())
      if (res.trace.empty() || row.best < res.trace.back().best)
        res.trace.push_back({row.seconds + secs_offset, row.flips + flip_offset, row.best});
    flip_offset += ws.flips();
    if (!ws.trace().empty()) secs_offset += ws.trace().back().seconds;
    res.flips += ws.flips();
    if (res.cost.is_zero()) break;
  }
  return res;
}

SearchResult component_aware_walksat(const Mrf& mrf, const ComponentIndex& comps,
                                     std::uint64_t total_flips, const SearchParams& p) {
  SearchResult res;
  res.assignment.assign(mrf.atom_count(), 0);
  res.cost = {0, 0.0};
  for (std::int32_t c = 0; c < comps.count; ++c) {
    SubMrf sub = project(mrf, comps, c);
    SearchParams q = p;
    q.seed = p.seed ^ static_cast<std::uint64_t>(c);
    q.max_flips = std::max<std::uint64_t>(
        1, total_flips * sub.mrf.atom_count() / std::max<size_t>(mrf.atom_count(), 1));
    SearchResult r = walksat(sub.mrf, q);
    for (size_t i = 0; i < sub.atom_back.size(); ++i)
      res.assignment[sub.atom_back[i]] = r.assignment[i];
    res.cost = res.cost + r.cost;
    res.flips += r.flips;
    double secs = res.trace.empty() ? 0.0 : res.trace.back().seconds;
    if (!r.trace.empty()) secs += r.trace.back().seconds;
    res.trace.push_back({secs, res.flips, res.cost});
  }
  return res;
}

namespace {

// Clause set a partition sees while the rest of the assignment is frozen.
// Frozen-true literals satisfy positive clauses (dropped) and permanently
// violate negative ones (excluded: local flips cannot change them). Frozen
// false literals just disappear from the disjunction.
Mrf reduce_view(const Mrf& mrf, const PartitionResult& parts, std::uint32_t pid,
                const std::vector<std::uint32_t>& cids, const Assignment& frozen,
                std::vector<std::int32_t>& local_of_atom) {
  Mrf out;
  const Partition& part = parts.parts[pid];
  out.atom_aid.resize(part.atoms.size());
  for (size_t i = 0; i < part.atoms.size(); ++i) {
    out.atom_aid[i] = mrf.atom_aid.empty() ? 0 : mrf.atom_aid[part.atoms[i]];
    local_of_atom[part.atoms[i]] = static_cast<std::int32_t>(i);
  }
  std::vector<std::int32_t> lits;
  for (std::uint32_t cid : cids) {
    lits.clear();
    bool satisfied_by_frozen = false;
    for (std::int32_t lit : mrf.lits(cid)) {
      std::uint32_t a = static_cast<std::uint32_t>((lit > 0 ? lit : -lit) - 1);
      std::int32_t local = local_of_atom[a];
      if (local >= 0) {
        lits.push_back(lit > 0 ? local + 1 : -(local + 1));
        continue;
      }
      bool lit_true = (frozen[a] != 0) == (lit > 0);
      if (lit_true) {
        satisfied_by_frozen = true;
        break;
      }
    }
    if (satisfied_by_frozen || lits.empty()) continue;
    out.add_clause(lits, mrf.clauses[cid].weight);
  }
  out.finalize();
  for (std::uint32_t a : part.atoms) local_of_atom[a] = -1;  // leave the map clean
  return out;
}

}  // namespace

SearchResult gauss_seidel(const Mrf& mrf, const PartitionResult& parts, int rounds,
                          std::uint64_t per_partition_flips, const SearchParams& p,
                          const std::vector<std::uint32_t>* order) {
  size_t np = parts.parts.size();
  std::vector<std::uint32_t> sweep;
  if (order) {
    sweep = *order;
  } else {
    sweep.resize(np);
    for (std::uint32_t i = 0; i < np; ++i) sweep[i] = i;
  }
  auto t0 = std::chrono::steady_clock::now();

  // Which cut clauses touch each partition; partitions with none keep the
  // same reduced view forever and are never rebound.
  std::vector<std::vector<std::uint32_t>> touching(np);
  for (std::uint32_t cid : parts.cut.clauses) {
    std::vector<bool> seen(np, false);
    for (std::int32_t lit : mrf.lits(cid)) {
      std::uint32_t a = static_cast<std::uint32_t>((lit > 0 ? lit : -lit) - 1);
      std::uint32_t part = parts.atom_part[a];
      if (!seen[part]) {
        seen[part] = true;
        touching[part].push_back(cid);
      }
    }
  }
  std::vector<std::vector<std::uint32_t>> view_cids(np);
  for (std::uint32_t pid = 0; pid < np; ++pid) {
    auto& v = view_cids[pid];
    v = parts.parts[pid].clauses;
    v.insert(v.end(), touching[pid].begin(), touching[pid].end());
    std::sort(v.begin(), v.end());
  }

  Assignment cur(mrf.atom_count(), 0);
  std::vector<std::unique_ptr<Mrf>> views(np);
  std::vector<std::unique_ptr<WalkState>> states(np);
  std::vector<std::int32_t> local_of_atom(mrf.atom_count(), -1);

  SearchParams q = p;
  q.max_tries = 1;

  SearchResult res;
  bool have_best = false;
  std::uint64_t total_flips = 0;

  auto consider = [&](const Assignment& a, bool prefer_on_tie) {
    Cost c = cost(mrf, a);
    if (!have_best || c < res.cost || (prefer_on_tie && c == res.cost)) {
      res.cost = c;
      res.assignment = a;
      have_best = true;
    }
  };

  for (int round = 0; round < rounds; ++round) {
    for (std::uint32_t pid : sweep) {
      if (!states[pid]) {
        views[pid] = std::make_unique<Mrf>(
            reduce_view(mrf, parts, pid, view_cids[pid], cur, local_of_atom));
        states[pid] = std::make_unique<WalkState>(*views[pid],
                                                  p.seed ^ static_cast<std::uint64_t>(pid));
        states[pid]->random_init();
      } else if (!touching[pid].empty()) {
        views[pid] = std::make_unique<Mrf>(
            reduce_view(mrf, parts, pid, view_cids[pid], cur, local_of_atom));
        states[pid]->rebind(*views[pid], true);
      }
      std::uint64_t before = states[pid]->flips();
      states[pid]->run(per_partition_flips, q);
      total_flips += states[pid]->flips() - before;
      const Assignment& local = states[pid]->assignment();
      const auto& atoms = parts.parts[pid].atoms;
      for (size_t i = 0; i < atoms.size(); ++i) cur[atoms[i]] = local[i];
    }
    consider(cur, false);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    res.trace.push_back({secs, total_flips, res.cost});
  }

  // Stitch of the per-partition bests; preferred on cost ties so that with no
  // cut clauses the result degenerates to independent per-partition search.
  Assignment stitched = cur;
  for (std::uint32_t pid = 0; pid < np; ++pid) {
    if (!states[pid]) continue;
    const Assignment& local = states[pid]->best_assignment();
    const auto& atoms = parts.parts[pid].atoms;
    for (size_t i = 0; i < atoms.size(); ++i) stitched[atoms[i]] = local[i];
  }
  consider(stitched, true);

  res.flips = total_flips;
  if (np == 1 && parts.cut.clauses.empty()) res.trace = states[0]->trace();
  return res;
}

void parallel_round_robin(size_t items, int workers, const std::function<void(size_t)>& fn) {
  int n = std::max(1, workers);
  if (n == 1 || items <= 1) {
    for (size_t i = 0; i < items; ++i) fn(i);
    return;
  }
  std::exception_ptr first_error;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (int w = 0; w < n; ++w)
    pool.emplace_back([&, w]() {
      for (size_t i = static_cast<size_t>(w); i < items; i += static_cast<size_t>(n)) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace mlnmap
