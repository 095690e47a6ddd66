#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace mlnmap {

using Sym = std::int32_t;     // interned constant
using TypeId = std::int32_t;  // domain type
using Aid = std::int64_t;     // atom id, 1-based; 0 means "no atom"

enum class TruthValue : std::uint8_t { False = 0, True = 1, Unknown = 2 };

enum class WeightTier : std::uint8_t { Soft = 0, Hard = 1, HardNegated = 2 };

// Soft weights carry a signed real; the two hard tiers stand in for +inf/-inf.
struct Weight {
  WeightTier tier = WeightTier::Soft;
  double value = 0.0;

  static Weight soft(double v) { return {WeightTier::Soft, v}; }
  static Weight hard() { return {WeightTier::Hard, 0.0}; }
  static Weight hard_negated() { return {WeightTier::HardNegated, 0.0}; }

  // Violation convention: positive-semantics clauses are violated when false,
  // negative-semantics clauses when true.
  bool positive_semantics() const {
    return tier == WeightTier::Hard ||
           (tier == WeightTier::Soft && !(value < 0.0));
  }
  bool is_hard() const { return tier != WeightTier::Soft; }
  double magnitude() const {
    return is_hard() ? std::numeric_limits<double>::infinity()
                     : (value < 0.0 ? -value : value);
  }
  bool operator==(const Weight&) const = default;
};

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : Error {
  using Error::Error;
};
struct BudgetError : Error {
  using Error::Error;
};

class SymbolPool {
 public:
  Sym intern(std::string_view s) {
    auto it = ids_.find(std::string(s));
    if (it != ids_.end()) return it->second;
    Sym id = static_cast<Sym>(names_.size());
    names_.emplace_back(s);
    ids_.emplace(names_.back(), id);
    return id;
  }
  Sym find(std::string_view s) const {
    auto it = ids_.find(std::string(s));
    return it == ids_.end() ? -1 : it->second;
  }
  const std::string& name(Sym s) const { return names_.at(static_cast<size_t>(s)); }
  size_t size() const { return names_.size(); }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, Sym> ids_;
};

// Named constant universes. Every constant belongs to exactly one type.
class DomainCatalog {
 public:
  TypeId add_type(std::string_view name) {
    auto it = type_ids_.find(std::string(name));
    if (it != type_ids_.end()) return it->second;
    TypeId id = static_cast<TypeId>(type_names_.size());
    type_names_.emplace_back(name);
    type_ids_.emplace(type_names_.back(), id);
    constants_.emplace_back();
    return id;
  }
  TypeId type_id(std::string_view name) const {
    auto it = type_ids_.find(std::string(name));
    return it == type_ids_.end() ? -1 : it->second;
  }
  const std::string& type_name(TypeId t) const { return type_names_.at(static_cast<size_t>(t)); }
  size_t type_count() const { return type_names_.size(); }

  void add_constant(TypeId t, Sym c, const SymbolPool& pool) {
    auto it = owner_.find(c);
    if (it != owner_.end()) {
      if (it->second != t)
        throw Error("constant '" + pool.name(c) + "' already belongs to domain '" +
                    type_name(it->second) + "', cannot also join '" + type_name(t) + "'");
      return;
    }
    owner_.emplace(c, t);
    constants_[static_cast<size_t>(t)].push_back(c);
  }
  bool contains(TypeId t, Sym c) const {
    auto it = owner_.find(c);
    return it != owner_.end() && it->second == t;
  }
  TypeId type_of(Sym c) const {
    auto it = owner_.find(c);
    return it == owner_.end() ? -1 : it->second;
  }
  const std::vector<Sym>& constants(TypeId t) const { return constants_.at(static_cast<size_t>(t)); }

 private:
  std::vector<std::string> type_names_;
  std::unordered_map<std::string, TypeId> type_ids_;
  std::vector<std::vector<Sym>> constants_;
  std::unordered_map<Sym, TypeId> owner_;
};

}  // namespace mlnmap
