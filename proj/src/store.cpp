#include "mlnmap/store.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <fstream>

namespace mlnmap {

std::string Relation::key_of(std::span<const Sym> args) const {
  std::string k(args.size() * sizeof(Sym), '\0');
  std::memcpy(k.data(), args.data(), k.size());
  return k;
}

std::int64_t Relation::find(std::span<const Sym> args) const {
  auto it = index_.find(key_of(args));
  return it == index_.end() ? -1 : static_cast<std::int64_t>(it->second);
}

size_t Relation::add(std::span<const Sym> args, Aid aid, TruthValue t) {
  size_t row = aids_.size();
  pool_.insert(pool_.end(), args.begin(), args.end());
  aids_.push_back(aid);
  truths_.push_back(t);
  index_.emplace(key_of(args), static_cast<std::uint32_t>(row));
  return row;
}

AtomStore::AtomStore(const MLNProgram& prog)
    : domains_(prog.domains), symbols_(prog.constants) {
  meta_.reserve(prog.predicates.size());
  for (const auto& p : prog.predicates) {
    PredMeta m;
    m.name = p.name;
    m.arity = static_cast<int>(p.arg_types.size());
    m.closed_world = p.closed_world;
    m.type_ids = p.type_ids;
    meta_.push_back(std::move(m));
    rels_.emplace_back(static_cast<int>(p.arg_types.size()));
  }
}

void AtomStore::load_evidence(const EvidenceSet& ev) {
  for (const auto& e : ev.entries) {
    Relation& rel = rels_[static_cast<size_t>(e.pred)];
    std::int64_t row = rel.find(e.args);
    TruthValue t = e.truth ? TruthValue::True : TruthValue::False;
    if (row >= 0) {
      if (rel.truth(static_cast<size_t>(row)) != t)
        throw Error("conflicting evidence for " + atom_text(rel.aid(static_cast<size_t>(row))));
      continue;
    }
    Aid aid = next_aid_++;
    size_t r = rel.add(e.args, aid, t);
    by_aid_.emplace_back(e.pred, static_cast<std::uint32_t>(r));
  }
}

Aid AtomStore::get_or_create(int pred, std::span<const Sym> args) {
  Relation& rel = rels_[static_cast<size_t>(pred)];
  if (static_cast<int>(args.size()) != rel.arity())
    throw Error("arity mismatch for predicate " + meta_[static_cast<size_t>(pred)].name);
  std::int64_t row = rel.find(args);
  if (row >= 0) return rel.aid(static_cast<size_t>(row));
  const auto& types = meta_[static_cast<size_t>(pred)].type_ids;
  for (size_t i = 0; i < args.size(); ++i)
    if (!domains_.contains(types[i], args[i]))
      throw Error("constant '" + symbols_.name(args[i]) + "' is not in domain '" +
                  domains_.type_name(types[i]) + "'");
  Aid aid = next_aid_++;
  size_t r = rel.add(args, aid, TruthValue::Unknown);
  by_aid_.emplace_back(pred, static_cast<std::uint32_t>(r));
  return aid;
}

Aid AtomStore::find(int pred, std::span<const Sym> args) const {
  const Relation& rel = rels_[static_cast<size_t>(pred)];
  std::int64_t row = rel.find(args);
  return row < 0 ? 0 : rel.aid(static_cast<size_t>(row));
}

TruthValue AtomStore::effective_truth(int pred, std::span<const Sym> args) const {
  const Relation& rel = rels_[static_cast<size_t>(pred)];
  std::int64_t row = rel.find(args);
  if (row >= 0) return rel.truth(static_cast<size_t>(row));
  return meta_[static_cast<size_t>(pred)].closed_world ? TruthValue::False : TruthValue::Unknown;
}

TruthValue AtomStore::truth(Aid aid) const {
  auto [pred, row] = by_aid_.at(static_cast<size_t>(aid - 1));
  return rels_[static_cast<size_t>(pred)].truth(row);
}

int AtomStore::pred_of(Aid aid) const { return by_aid_.at(static_cast<size_t>(aid - 1)).first; }

std::span<const Sym> AtomStore::args_of(Aid aid) const {
  auto [pred, row] = by_aid_.at(static_cast<size_t>(aid - 1));
  return rels_[static_cast<size_t>(pred)].args(row);
}

std::string AtomStore::atom_text(Aid aid) const {
  auto [pred, row] = by_aid_.at(static_cast<size_t>(aid - 1));
  std::string s = meta_[static_cast<size_t>(pred)].name + "(";
  auto args = rels_[static_cast<size_t>(pred)].args(row);
  for (size_t i = 0; i < args.size(); ++i) {
    if (i) s += ", ";
    s += symbols_.name(args[i]);
  }
  return s + ")";
}

AtomStore bulk_load(const MLNProgram& prog, const EvidenceSet& ev) {
  AtomStore store(prog);
  store.load_evidence(ev);
  return store;
}

size_t ClauseTable::add(std::span<const std::int64_t> lits, Weight w, bool* merged) {
  std::vector<std::int64_t> sorted(lits.begin(), lits.end());
  std::sort(sorted.begin(), sorted.end());
  std::string key(1, static_cast<char>(w.tier));
  key.resize(1 + sorted.size() * sizeof(std::int64_t));
  std::memcpy(key.data() + 1, sorted.data(), sorted.size() * sizeof(std::int64_t));

  auto it = index_.find(key);
  if (it != index_.end()) {
    ClauseRow& row = rows_[it->second];
    if (w.tier == WeightTier::Soft) row.weight.value += w.value;
    ++merged_;
    if (merged) *merged = true;
    return it->second;
  }
  ClauseRow row;
  row.cid = static_cast<std::int64_t>(rows_.size());
  row.lits.assign(lits.begin(), lits.end());
  row.weight = w;
  rows_.push_back(std::move(row));
  index_.emplace(std::move(key), static_cast<std::uint32_t>(rows_.size() - 1));
  if (merged) *merged = false;
  return rows_.size() - 1;
}

namespace {

constexpr char kMagic[4] = {'M', 'L', 'N', 'C'};
constexpr std::uint32_t kVersion = 1;

std::uint64_t fnv1a(const char* data, size_t n, std::uint64_t h = 1469598103934665603ull) {
  for (size_t i = 0; i < n; ++i) {
    h ^= static_cast<unsigned char>(data[i]);
    h *= 1099511628211ull;
  }
  return h;
}

template <class T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

template <class T>
T get(std::ifstream& in, const char* what) {
  char buf[sizeof(T)];
  if (!in.read(buf, sizeof(T))) throw IoError(std::string("clause file truncated reading ") + what);
  T v;
  std::memcpy(&v, buf, sizeof(T));
  return v;
}

std::string encode_rows(const ClauseTable& table) {
  std::string payload;
  for (const auto& row : table.rows()) {
    put<std::uint8_t>(payload, static_cast<std::uint8_t>(row.weight.tier));
    put<double>(payload, row.weight.value);
    put<std::uint32_t>(payload, static_cast<std::uint32_t>(row.lits.size()));
    for (std::int64_t lit : row.lits) put<std::int64_t>(payload, lit);
  }
  return payload;
}

}  // namespace

void persist_clauses(const ClauseTable& table, const std::string& path) {
  std::string payload = encode_rows(table);
  std::string header;
  header.append(kMagic, 4);
  put<std::uint32_t>(header, kVersion);
  put<std::uint64_t>(header, table.size());
  put<std::uint64_t>(header, fnv1a(payload.data(), payload.size()));
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (!out) throw IoError("short write to " + path);
}

namespace {

// Validates header and checksum; returns (row count, payload offset).
std::pair<std::uint64_t, std::uint64_t> validate_clause_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
    throw IoError("bad magic in " + path);
  auto version = get<std::uint32_t>(in, "version");
  if (version != kVersion) throw IoError("unsupported clause file version");
  auto count = get<std::uint64_t>(in, "row count");
  auto checksum = get<std::uint64_t>(in, "checksum");
  std::string rest;
  {
    std::string chunk(1 << 16, '\0');
    while (in.read(chunk.data(), static_cast<std::streamsize>(chunk.size())))
      rest.append(chunk.data(), static_cast<size_t>(in.gcount()));
    rest.append(chunk.data(), static_cast<size_t>(in.gcount()));
  }
  if (fnv1a(rest.data(), rest.size()) != checksum)
    throw IoError("checksum mismatch in " + path);
  return {count, 4 + 4 + 8 + 8};
}

}  // namespace

void for_each_clause(const std::string& path, const std::function<void(ClauseRow&&)>& fn) {
  auto [count, offset] = validate_clause_file(path);
  std::ifstream in(path, std::ios::binary);
  in.seekg(static_cast<std::streamoff>(offset));
  for (std::uint64_t i = 0; i < count; ++i) {
    ClauseRow row;
    row.cid = static_cast<std::int64_t>(i);
    row.weight.tier = static_cast<WeightTier>(get<std::uint8_t>(in, "tier"));
    row.weight.value = get<double>(in, "weight");
    auto n = get<std::uint32_t>(in, "literal count");
    row.lits.resize(n);
    for (std::uint32_t k = 0; k < n; ++k) row.lits[k] = get<std::int64_t>(in, "literal");
    fn(std::move(row));
  }
}

ClauseTable load_clauses(const std::string& path) {
  ClauseTable table;
  for_each_clause(path, [&](ClauseRow&& row) { table.add(row.lits, row.weight); });
  return table;
}

void write_atom_dictionary(const AtomStore& store, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  for (Aid aid = 1; aid <= store.max_aid(); ++aid) {
    const char* t = store.truth(aid) == TruthValue::True    ? "true"
                    : store.truth(aid) == TruthValue::False ? "false"
                                                            : "unknown";
    out << aid << "\t" << store.atom_text(aid) << "\t" << t << "\n";
  }
  if (!out) throw IoError("short write to " + path);
}

}  // namespace mlnmap
