#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>
#include <vector>

#include "mlnmap/partition.hpp"

using namespace mlnmap;

static Mrf random_mrf(std::mt19937_64& rng, size_t max_atoms = 10, size_t max_clauses = 14) {
  size_t atoms = 2 + rng() % (max_atoms - 1);
  std::vector<std::pair<std::vector<int>, Weight>> cls;
  size_t n = 1 + rng() % max_clauses;
  for (size_t i = 0; i < n; ++i) {
    size_t len = 1 + rng() % 3;
    std::set<int> used;
    std::vector<int> lits;
    for (size_t j = 0; j < len; ++j) {
      int v = 1 + static_cast<int>(rng() % atoms);
      if (!used.insert(v).second) continue;
      lits.push_back((rng() & 1) ? v : -v);
    }
    double w = (1.0 + static_cast<double>(rng() % 8)) / 2.0 * ((rng() & 1) ? 1 : -1);
    cls.push_back({lits, (rng() % 5 == 0) ? Weight::hard() : Weight::soft(w)});
  }
  return make_mrf(atoms, cls);
}

TEST_CASE("triangle splits where the lightest edge is") {
  // three atoms pairwise linked; edge weights 3, 2, 1
  Mrf m = make_mrf(3, {
                          {{1, 2}, Weight::soft(3)},
                          {{2, 3}, Weight::soft(1)},
                          {{1, 3}, Weight::soft(2)},
                      });
  PartitionResult pr = partition(m, 4);
  // heaviest edge {1,2} merges (2 atoms + 2 lits = 4 units). edge {1,3} would
  // make 3 atoms + 4 lits = 7 > 4, refused. edge {2,3} likewise.
  REQUIRE(pr.parts.size() == 2);
  CHECK(pr.parts[0].atoms == std::vector<std::uint32_t>{0, 1});
  CHECK(pr.parts[1].atoms == std::vector<std::uint32_t>{2});
  CHECK(pr.parts[0].size_units == 4);
  CHECK(pr.parts[1].size_units == 1);
  REQUIRE(pr.cut.clauses.size() == 2);
  CHECK(pr.cut.soft_weight == doctest::Approx(3.0));  // |1| + |2|
  CHECK(pr.cut.hard_count == 0);
  CHECK(!pr.oversize);

  // cut of weight 3 is the brute force minimum for this beta: any single
  // partition holding two atoms can accept at most one edge.
  CHECK(pr.atom_part == std::vector<std::int32_t>{0, 0, 1});
  CHECK(pr.cut.clauses == std::vector<std::uint32_t>{1, 2});
  // cut clauses are owned by the partition of their smallest atom
  CHECK(pr.clause_owner == std::vector<std::int32_t>{0, 0, 0});
}

TEST_CASE("hard clauses merge before any soft weight") {
  // the hard edge wins the shared atom even against soft weight 9
  Mrf m = make_mrf(3, {
                          {{1, 2}, Weight::soft(9)},
                          {{2, 3}, Weight::hard()},
                      });
  PartitionResult pr = partition(m, 4);
  REQUIRE(pr.parts.size() == 2);
  // partition ids ordered by smallest atom index regardless of merge order
  CHECK(pr.parts[0].atoms == std::vector<std::uint32_t>{0});
  CHECK(pr.parts[1].atoms == std::vector<std::uint32_t>{1, 2});
  CHECK(pr.cut.clauses == std::vector<std::uint32_t>{0});
  CHECK(pr.cut.soft_weight == doctest::Approx(9.0));
  CHECK(pr.cut.hard_count == 0);
  CHECK(pr.clause_owner == std::vector<std::int32_t>{0, 1});
}

TEST_CASE("a chain breaks at its lightest link") {
  Mrf m = make_mrf(4, {
                          {{1, 2}, Weight::soft(3)},
                          {{2, 3}, Weight::soft(2)},
                          {{3, 4}, Weight::soft(4)},
                      });
  PartitionResult pr = partition(m, 4);
  REQUIRE(pr.parts.size() == 2);
  CHECK(pr.parts[0].atoms == std::vector<std::uint32_t>{0, 1});
  CHECK(pr.parts[1].atoms == std::vector<std::uint32_t>{2, 3});
  CHECK(pr.cut.clauses == std::vector<std::uint32_t>{1});
  CHECK(pr.cut.soft_weight == doctest::Approx(2.0));
  CHECK(pr.clause_owner == std::vector<std::int32_t>{0, 0, 1});
}

TEST_CASE("oversize clauses are force merged with a flag") {
  Mrf m = make_mrf(5, {{{1, 2, 3, 4, 5}, Weight::soft(1)}});
  // own footprint: 5 atoms + 5 lits = 10 > beta = 3
  PartitionResult pr = partition(m, 3);
  CHECK(pr.oversize);
  REQUIRE(pr.parts.size() == 1);
  CHECK(pr.parts[0].size_units == 10);
  CHECK(pr.cut.clauses.empty());
}

TEST_CASE("unbounded beta reproduces connected components") {
  std::mt19937_64 rng(501);
  for (int t = 0; t < 100; ++t) {
    Mrf m = random_mrf(rng);
    PartitionResult pr = partition(m, kNoBound);
    ComponentIndex idx = components(m);
    REQUIRE(pr.parts.size() == static_cast<size_t>(idx.count));
    CHECK(pr.cut.clauses.empty());
    CHECK(!pr.oversize);
    for (size_t a = 0; a < m.atom_count(); ++a)
      CHECK(pr.atom_part[a] == idx.atom_comp[a]);
    for (size_t c = 0; c < m.clause_count(); ++c)
      CHECK(pr.clause_owner[c] == idx.clause_comp[c]);
  }
}

TEST_CASE("every partition respects beta unless oversize") {
  std::mt19937_64 rng(502);
  for (int t = 0; t < 100; ++t) {
    Mrf m = random_mrf(rng);
    std::uint64_t beta = 2 + rng() % 20;
    PartitionResult pr = partition(m, beta);
    for (const auto& p : pr.parts) {
      if (!pr.oversize) CHECK(p.size_units <= beta);
      CHECK(std::is_sorted(p.atoms.begin(), p.atoms.end()));
      CHECK(std::is_sorted(p.clauses.begin(), p.clauses.end()));
    }
    // atom_part is consistent with the parts lists
    for (size_t pid = 0; pid < pr.parts.size(); ++pid)
      for (auto a : pr.parts[pid].atoms)
        CHECK(pr.atom_part[a] == static_cast<std::int32_t>(pid));
    // every clause is either accepted by exactly one partition or cut
    size_t accepted = 0;
    for (const auto& p : pr.parts) accepted += p.clauses.size();
    CHECK(accepted + pr.cut.clauses.size() == m.clause_count());
    // accepted clauses only touch atoms of their own partition
    for (const auto& p : pr.parts)
      for (auto cid : p.clauses)
        for (auto lit : m.lits(cid)) {
          std::uint32_t a = static_cast<std::uint32_t>(std::abs(lit)) - 1;
          CHECK(pr.atom_part[a] == pr.clause_owner[cid]);
        }
  }
}

TEST_CASE("first fit decreasing packs the textbook example") {
  std::vector<Partition> parts(5);
  std::uint64_t sizes[] = {5, 4, 3, 2, 1};
  for (size_t i = 0; i < 5; ++i) parts[i].size_units = sizes[i];
  auto batches = pack_batches(parts, 6);
  REQUIRE(batches.size() == 3);
  CHECK(batches[0] == std::vector<std::uint32_t>{0, 4});  // 5 + 1
  CHECK(batches[1] == std::vector<std::uint32_t>{1, 3});  // 4 + 2
  CHECK(batches[2] == std::vector<std::uint32_t>{2});     // 3
}

TEST_CASE("batches never exceed the budget") {
  std::mt19937_64 rng(503);
  for (int t = 0; t < 200; ++t) {
    size_t n = 1 + rng() % 12;
    std::vector<Partition> parts(n);
    std::uint64_t budget = 8 + rng() % 24;
    for (auto& p : parts) p.size_units = 1 + rng() % budget;
    auto batches = pack_batches(parts, budget);
    std::vector<bool> seen(n, false);
    for (const auto& b : batches) {
      std::uint64_t total = 0;
      for (auto pid : b) {
        total += parts[pid].size_units;
        CHECK(!seen[pid]);
        seen[pid] = true;
      }
      CHECK(total <= budget);
      CHECK(!b.empty());
    }
    CHECK(std::count(seen.begin(), seen.end(), false) == 0);
  }
}

// smallest number of bins for up to 8 items, exact, by subset DP
static size_t optimal_bins(const std::vector<std::uint64_t>& sizes, std::uint64_t budget) {
  size_t n = sizes.size();
  size_t full = (size_t{1} << n) - 1;
  std::vector<bool> fits(full + 1, false);
  for (size_t mask = 1; mask <= full; ++mask) {
    std::uint64_t total = 0;
    for (size_t i = 0; i < n; ++i)
      if (mask & (size_t{1} << i)) total += sizes[i];
    fits[mask] = total <= budget;
  }
  std::vector<int> best(full + 1, 1 << 20);
  best[0] = 0;
  for (size_t mask = 1; mask <= full; ++mask) {
    // iterate submasks
    for (size_t sub = mask; sub; sub = (sub - 1) & mask)
      if (fits[sub] && best[mask ^ sub] + 1 < best[mask]) best[mask] = best[mask ^ sub] + 1;
  }
  return static_cast<size_t>(best[full]);
}

TEST_CASE("first fit decreasing stays near optimal on small inputs") {
  std::mt19937_64 rng(504);
  for (int t = 0; t < 120; ++t) {
    size_t n = 2 + rng() % 7;  // at most 8
    std::uint64_t budget = 10 + rng() % 20;
    std::vector<Partition> parts(n);
    std::vector<std::uint64_t> sizes(n);
    for (size_t i = 0; i < n; ++i) {
      sizes[i] = 1 + rng() % budget;
      parts[i].size_units = sizes[i];
    }
    auto batches = pack_batches(parts, budget);
    size_t opt = optimal_bins(sizes, budget);
    CHECK(batches.size() >= opt);
    CHECK(batches.size() <= opt + 1);
  }
}

TEST_CASE("single oversized partition is a budget error") {
  std::vector<Partition> parts(2);
  parts[0].size_units = 4;
  parts[1].size_units = 9;
  CHECK_THROWS_AS(pack_batches(parts, 8), BudgetError);
}

TEST_CASE("gain estimate") {
  CHECK(estimate_gain(3, 1e6, 420, 10000) == doctest::Approx(2.0 - 42000.0));
  CHECK(estimate_gain(0, 0, 0, 1) == doctest::Approx(1.0));
  // splitting pays off when the cut is small relative to the flip budget
  CHECK(estimate_gain(30, 1e6, 1, 1000000) > 0);
  CHECK(estimate_gain(3, 1e9, 5000, 10000) < 0);
}

TEST_CASE("r diagnostic on the two atom instance") {
  // x + y with weights 1, 1 and the shared -1 disjunction; optimum at TT
  Mrf m = make_mrf(2, {
                          {{1}, Weight::soft(1)},
                          {{2}, Weight::soft(1)},
                          {{1, 2}, Weight::soft(-1)},
                      });
  const Mrf* comps[] = {&m};
  RDiagnostic d = compute_r(comps);
  REQUIRE(d.defined);
  CHECK(d.numerator == doctest::Approx(1.0));
  CHECK(d.denominator == doctest::Approx(1.75));
  CHECK(d.r == doctest::Approx(4.0 / 7.0));
}

TEST_CASE("r diagnostic refuses oversized components") {
  Mrf m = make_mrf(13, {{{1, 13}, Weight::soft(1)}});
  const Mrf* comps[] = {&m};
  RDiagnostic d = compute_r(comps, 0.5, 12);
  CHECK(!d.defined);
}

TEST_CASE("r diagnostic spans multiple components") {
  // two copies of the same component: extrema equal, same r
  Mrf a = make_mrf(2, {
                          {{1}, Weight::soft(1)},
                          {{2}, Weight::soft(1)},
                          {{1, 2}, Weight::soft(-1)},
                      });
  Mrf b = make_mrf(2, {
                          {{1}, Weight::soft(1)},
                          {{2}, Weight::soft(1)},
                          {{1, 2}, Weight::soft(-1)},
                      });
  const Mrf* comps[] = {&a, &b};
  RDiagnostic d = compute_r(comps);
  REQUIRE(d.defined);
  CHECK(d.r == doctest::Approx(4.0 / 7.0));
}
