#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "mlnmap/parser.hpp"
#include "mlnmap/store.hpp"

using namespace mlnmap;

static MLNProgram tiny_prog() {
  return parse_program(
      "domain D = {A, B, C}\n"
      "*closed(D, D)\n"
      "open(D)\n"
      "1 open(x) v open(x)\n");
}

static std::string tmp_path(const char* stem) {
  return (std::filesystem::temp_directory_path() / stem).string();
}

TEST_CASE("evidence load and truth lookup") {
  MLNProgram prog = tiny_prog();
  EvidenceSet ev = parse_evidence("closed(A, B)\n!open(C)\nopen(A)\n", prog);
  AtomStore store = bulk_load(prog, ev);

  int closed = prog.predicate_index("closed");
  int open = prog.predicate_index("open");
  Sym a = store.symbols().find("A");
  Sym b = store.symbols().find("B");
  Sym c = store.symbols().find("C");

  std::vector<Sym> ab{a, b}, ba{b, a}, ca{c};
  CHECK(store.effective_truth(closed, ab) == TruthValue::True);
  // absent closed-world tuple defaults false, no row is created
  CHECK(store.effective_truth(closed, ba) == TruthValue::False);
  CHECK(store.find(closed, ba) == 0);
  std::vector<Sym> av{a};
  CHECK(store.effective_truth(open, av) == TruthValue::True);
  CHECK(store.effective_truth(open, ca) == TruthValue::False);
  // absent open-world tuple is unknown
  std::vector<Sym> bv{b};
  CHECK(store.effective_truth(open, bv) == TruthValue::Unknown);
  CHECK(store.max_aid() == 3);
}

TEST_CASE("get_or_create is idempotent and assigns sequential aids") {
  MLNProgram prog = tiny_prog();
  AtomStore store = bulk_load(prog, {});
  int open = prog.predicate_index("open");
  Sym a = store.symbols().find("A");
  Sym b = store.symbols().find("B");

  std::vector<Sym> av{a}, bv{b};
  Aid first = store.get_or_create(open, av);
  Aid second = store.get_or_create(open, bv);
  CHECK(first == 1);
  CHECK(second == 2);
  CHECK(store.get_or_create(open, av) == first);
  CHECK(store.truth(first) == TruthValue::Unknown);
  CHECK(store.pred_of(first) == open);
  CHECK(store.atom_text(first) == "open(A)");
}

TEST_CASE("conflicting evidence throws") {
  MLNProgram prog = tiny_prog();
  CHECK_THROWS_AS(parse_evidence("open(A)\n!open(A)\n", prog), Error);
}

TEST_CASE("duplicate consistent evidence is fine") {
  MLNProgram prog = tiny_prog();
  EvidenceSet ev = parse_evidence("open(A)\nopen(A)\n", prog);
  AtomStore store = bulk_load(prog, ev);
  CHECK(store.max_aid() == 1);
}

TEST_CASE("clause table dedup") {
  ClauseTable t;
  std::vector<std::int64_t> l1{1, -2, 3};
  std::vector<std::int64_t> l2{3, 1, -2};  // same set, different order
  std::vector<std::int64_t> l3{1, 2, 3};

  bool merged = false;
  size_t r0 = t.add(l1, Weight::soft(1.5), &merged);
  CHECK(!merged);
  size_t r1 = t.add(l2, Weight::soft(2.0), &merged);
  CHECK(merged);
  CHECK(r1 == r0);
  CHECK(t.row(r0).weight.value == doctest::Approx(3.5));

  t.add(l3, Weight::soft(1.0), &merged);
  CHECK(!merged);

  // same lits, different tier: separate rows
  size_t rh = t.add(l1, Weight::hard(), &merged);
  CHECK(!merged);
  CHECK(rh != r0);
  // duplicate hard collapses without a weight change
  size_t rh2 = t.add(l2, Weight::hard(), &merged);
  CHECK(merged);
  CHECK(rh2 == rh);
  CHECK(t.row(rh).weight.tier == WeightTier::Hard);

  CHECK(t.size() == 3);
  CHECK(t.merged_count() == 2);
}

TEST_CASE("negative weights merge by summing") {
  ClauseTable t;
  std::vector<std::int64_t> l{5};
  t.add(l, Weight::soft(-1.0));
  t.add(l, Weight::soft(-2.0));
  CHECK(t.size() == 1);
  CHECK(t.row(0).weight.value == doctest::Approx(-3.0));
}

TEST_CASE("persistence round trip is bit exact") {
  ClauseTable t;
  std::vector<std::int64_t> a{1, -2};
  std::vector<std::int64_t> b{2, 3, -4};
  std::vector<std::int64_t> c{-1};
  t.add(a, Weight::soft(0.1));  // not representable exactly, must survive
  t.add(b, Weight::hard());
  t.add(c, Weight::hard_negated());

  std::string path = tmp_path("mlnmap_store_rt.clauses");
  persist_clauses(t, path);
  ClauseTable u = load_clauses(path);

  REQUIRE(u.size() == t.size());
  for (size_t i = 0; i < t.size(); ++i) {
    CHECK(u.row(i).lits == t.row(i).lits);
    CHECK(u.row(i).weight.tier == t.row(i).weight.tier);
    CHECK(u.row(i).weight.value == t.row(i).weight.value);  // exact, not approx
  }
  std::filesystem::remove(path);
}

TEST_CASE("streaming reader sees the same rows") {
  ClauseTable t;
  for (int i = 1; i <= 50; ++i) {
    std::vector<std::int64_t> lits{i, -(i + 1)};
    t.add(lits, Weight::soft(0.25 * i));
  }
  std::string path = tmp_path("mlnmap_store_stream.clauses");
  persist_clauses(t, path);

  size_t n = 0;
  for_each_clause(path, [&](ClauseRow&& row) {
    CHECK(row.lits == t.row(n).lits);
    CHECK(row.weight.value == t.row(n).weight.value);
    ++n;
  });
  CHECK(n == t.size());
  std::filesystem::remove(path);
}

TEST_CASE("corrupt clause files are rejected") {
  ClauseTable t;
  std::vector<std::int64_t> a{1, 2};
  t.add(a, Weight::soft(1.0));
  std::string path = tmp_path("mlnmap_store_bad.clauses");
  persist_clauses(t, path);

  SUBCASE("flipped payload byte breaks the checksum") {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(-1, std::ios::end);
    char byte = 0;
    f.seekg(-1, std::ios::end);
    f.get(byte);
    f.seekp(-1, std::ios::end);
    f.put(static_cast<char>(byte ^ 0x40));
    f.close();
    CHECK_THROWS_AS(load_clauses(path), IoError);
  }
  SUBCASE("truncated file") {
    auto size = std::filesystem::file_size(path);
    std::filesystem::resize_file(path, size - 3);
    CHECK_THROWS_AS(load_clauses(path), IoError);
  }
  SUBCASE("wrong magic") {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(0);
    f.write("XXXX", 4);
    f.close();
    CHECK_THROWS_AS(load_clauses(path), IoError);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_clauses(tmp_path("mlnmap_no_such_file.clauses")), IoError);
  }
  std::filesystem::remove(path);
}

TEST_CASE("atom dictionary format") {
  MLNProgram prog = tiny_prog();
  EvidenceSet ev = parse_evidence("closed(A, B)\n!open(C)\n", prog);
  AtomStore store = bulk_load(prog, ev);

  std::string path = tmp_path("mlnmap_store_atoms.txt");
  write_atom_dictionary(store, path);
  std::ifstream in(path);
  std::string l1, l2;
  std::getline(in, l1);
  std::getline(in, l2);
  CHECK(l1 == "1\tclosed(A, B)\ttrue");
  CHECK(l2 == "2\topen(C)\tfalse");
  std::filesystem::remove(path);
}
