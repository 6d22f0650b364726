#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "actrchr/symbol.hpp"

namespace actr {

// Typing function: type name -> ordered slot list. The order is fixed at
// declaration time and drives every sorted encoding of chunk values.
class TypeTable {
public:
  /// Starts with the distinguished type `chunk` and its empty slot list.
  TypeTable();

  /// Throws std::invalid_argument on duplicate slots or a conflicting
  /// redeclaration. Redeclaring an identical type is a no-op.
  void declare(const Symbol& type, std::vector<Symbol> slots);

  bool contains(const Symbol& type) const;
  const std::vector<Symbol>& slots(const Symbol& type) const;
  std::optional<std::size_t> slot_index(const Symbol& type, const Symbol& slot) const;

  /// Declaration order, `chunk` first.
  const std::vector<std::pair<Symbol, std::vector<Symbol>>>& types() const { return types_; }

  friend bool operator==(const TypeTable&, const TypeTable&) = default;

private:
  std::vector<std::pair<Symbol, std::vector<Symbol>>> types_;
};

struct SlotValue {
  Symbol slot;
  Symbol value;

  friend bool operator==(const SlotValue&, const SlotValue&) = default;
  friend auto operator<=>(const SlotValue&, const SlotValue&) = default;
};

// A chunk with its identifier. `val` is total on the type's slots and kept in
// TypeTable slot order.
struct Chunk {
  Symbol id;
  Symbol type;
  std::vector<SlotValue> val;

  std::optional<Symbol> value_of(const Symbol& slot) const;

  friend bool operator==(const Chunk&, const Chunk&) = default;
};

/// Builds a chunk whose slots follow `types`; missing slots are filled with
/// nil, unknown slots are rejected with std::invalid_argument.
Chunk make_chunk(const TypeTable& types, Symbol id, Symbol type, const std::vector<SlotValue>& values);

const Chunk& nil_chunk();

/// Raised when two chunks share an id but differ in type or values.
class IdClash : public std::runtime_error {
public:
  explicit IdClash(const Symbol& id) : std::runtime_error("id clash on chunk '" + id.str() + "'"), id_(id) {}
  const Symbol& id() const { return id_; }

private:
  Symbol id_;
};

// A (partial) chunk store: chunks keyed by their unique id. Full stores hold
// the nil chunk; partial stores (results of actions) usually do not.
class ChunkStore {
public:
  using Map = std::map<Symbol, Chunk>;

  ChunkStore() = default;
  static ChunkStore with_nil();

  /// Inserts a chunk. An identical chunk under the same id is absorbed;
  /// a different chunk under the same id throws IdClash.
  void insert(Chunk chunk);

  bool contains(const Symbol& id) const { return chunks_.count(id) != 0; }
  const Chunk* find(const Symbol& id) const;

  /// Total lookup: unknown ids resolve to the nil chunk.
  const Chunk& id_inverse(const Symbol& id) const;

  std::size_t size() const { return chunks_.size(); }
  bool empty() const { return chunks_.empty(); }
  Map::const_iterator begin() const { return chunks_.begin(); }
  Map::const_iterator end() const { return chunks_.end(); }

  friend bool operator==(const ChunkStore&, const ChunkStore&) = default;

private:
  Map chunks_;
};

/// id_inverse as a free function.
const Chunk& id_inverse(const ChunkStore& store, const Symbol& x);

/// Maps ids of both merge operands to ids of the merge product.
using IdMap = std::map<Symbol, Symbol>;

struct MergeResult {
  ChunkStore store;
  IdMap map;
};

/// Id-deduplicating multiset union. The left operand embeds unchanged; chunks
/// of the right operand with an id already present must be identical to the
/// left one (IdClash otherwise). This instantiation never renames, so the
/// returned map is the identity on the ids of both operands.
MergeResult merge(const ChunkStore& left, const ChunkStore& right);

inline constexpr const char* kFreshPrefix = "c#";

bool is_fresh_id(const Symbol& id);
/// Counter of a fresh id, or nullopt when `id` is not of the form c#N.
std::optional<std::uint64_t> fresh_counter(const std::string& id);

/// Issues ids `c#0`, `c#1`, ... Parsed model ids may not use the prefix.
class FreshIds {
public:
  explicit FreshIds(std::uint64_t next = 0) : next_(next) {}

  /// A generator whose ids are disjoint from every fresh id in `store`.
  static FreshIds after(const ChunkStore& store);

  Symbol next();
  std::uint64_t peek() const { return next_; }

private:
  std::uint64_t next_;
};

}  // namespace actr
