#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "mlnmap/ast.hpp"

namespace mlnmap {

// One relation R_P(aid, args, truth) per predicate. Rows exist for evidence
// atoms and for unknown-truth atoms created during grounding; absent tuples of
// closed-world predicates are implicitly false and never materialized.
class Relation {
 public:
  explicit Relation(int arity) : arity_(arity) {}

  int arity() const { return arity_; }
  size_t size() const { return aids_.size(); }
  Aid aid(size_t row) const { return aids_[row]; }
  TruthValue truth(size_t row) const { return truths_[row]; }
  void set_truth(size_t row, TruthValue t) { truths_[row] = t; }
  std::span<const Sym> args(size_t row) const {
    return {pool_.data() + row * arity_, static_cast<size_t>(arity_)};
  }
  // Returns row index or -1.
  std::int64_t find(std::span<const Sym> args) const;
  size_t add(std::span<const Sym> args, Aid aid, TruthValue t);

 private:
  int arity_;
  std::vector<Sym> pool_;
  std::vector<Aid> aids_;
  std::vector<TruthValue> truths_;
  std::unordered_map<std::string, std::uint32_t> index_;  // packed args -> row

  std::string key_of(std::span<const Sym> args) const;
};

struct PredMeta {
  std::string name;
  int arity = 0;
  bool closed_world = false;
  std::vector<TypeId> type_ids;
};

class AtomStore {
 public:
  AtomStore(const MLNProgram& prog);

  void load_evidence(const EvidenceSet& ev);

  Aid get_or_create(int pred, std::span<const Sym> args);
  Aid find(int pred, std::span<const Sym> args) const;  // 0 if absent

  // Truth with the closed-world default for absent tuples.
  TruthValue effective_truth(int pred, std::span<const Sym> args) const;

  TruthValue truth(Aid aid) const;
  int pred_of(Aid aid) const;
  std::span<const Sym> args_of(Aid aid) const;
  std::string atom_text(Aid aid) const;

  int pred_count() const { return static_cast<int>(meta_.size()); }
  const PredMeta& meta(int pred) const { return meta_[static_cast<size_t>(pred)]; }
  const Relation& relation(int pred) const { return rels_[static_cast<size_t>(pred)]; }
  Aid max_aid() const { return next_aid_ - 1; }
  const DomainCatalog& domains() const { return domains_; }
  const SymbolPool& symbols() const { return symbols_; }

 private:
  std::vector<PredMeta> meta_;
  std::vector<Relation> rels_;
  std::vector<std::pair<int, std::uint32_t>> by_aid_;  // aid-1 -> (pred, row)
  Aid next_aid_ = 1;
  DomainCatalog domains_;
  SymbolPool symbols_;
};

AtomStore bulk_load(const MLNProgram& prog, const EvidenceSet& ev);

struct ClauseRow {
  std::int64_t cid = 0;
  std::vector<std::int64_t> lits;  // signed aids, sign encodes negation
  Weight weight;

  bool operator==(const ClauseRow&) const = default;
};

// Deduplicates on (unordered lit set, weight tier); duplicate soft clauses
// merge by summing weights, duplicate hard rows collapse.
class ClauseTable {
 public:
  // Returns the row index; merged is set when an existing row absorbed it.
  size_t add(std::span<const std::int64_t> lits, Weight w, bool* merged = nullptr);

  size_t size() const { return rows_.size(); }
  const ClauseRow& row(size_t i) const { return rows_[i]; }
  const std::vector<ClauseRow>& rows() const { return rows_; }
  std::uint64_t merged_count() const { return merged_; }

 private:
  std::vector<ClauseRow> rows_;
  std::unordered_map<std::string, std::uint32_t> index_;
  std::uint64_t merged_ = 0;
};

// Length-prefixed binary records with a checksummed header; bit-exact round
// trip including the weight doubles.
void persist_clauses(const ClauseTable& table, const std::string& path);
ClauseTable load_clauses(const std::string& path);

// Validates the whole file (magic, version, count, checksum), then streams
// rows one at a time without keeping the table in memory.
void for_each_clause(const std::string& path,
                     const std::function<void(ClauseRow&&)>& fn);

// Text sidecar mapping aid -> predicate(args) plus truth, one row per atom.
void write_atom_dictionary(const AtomStore& store, const std::string& path);

}  // namespace mlnmap
