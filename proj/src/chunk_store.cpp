#include "actrchr/chunk_store.hpp"

#include <algorithm>
#include <charconv>
#include <set>

namespace actr {

TypeTable::TypeTable() { types_.emplace_back(chunk_type_symbol(), std::vector<Symbol>{}); }

void TypeTable::declare(const Symbol& type, std::vector<Symbol> slots) {
  std::set<Symbol> seen;
  for (const auto& s : slots) {
    if (!seen.insert(s).second)
      throw std::invalid_argument("duplicate slot '" + s.str() + "' in type '" + type.str() + "'");
  }
  for (const auto& [name, existing] : types_) {
    if (name == type) {
      if (existing == slots) return;
      throw std::invalid_argument("conflicting redeclaration of type '" + type.str() + "'");
    }
  }
  types_.emplace_back(type, std::move(slots));
}

bool TypeTable::contains(const Symbol& type) const {
  return std::any_of(types_.begin(), types_.end(), [&](const auto& t) { return t.first == type; });
}

const std::vector<Symbol>& TypeTable::slots(const Symbol& type) const {
  for (const auto& [name, slots] : types_)
    if (name == type) return slots;
  throw std::out_of_range("unknown type '" + type.str() + "'");
}

std::optional<std::size_t> TypeTable::slot_index(const Symbol& type, const Symbol& slot) const {
  if (!contains(type)) return std::nullopt;
  const auto& s = slots(type);
  auto it = std::find(s.begin(), s.end(), slot);
  if (it == s.end()) return std::nullopt;
  return static_cast<std::size_t>(it - s.begin());
}

std::optional<Symbol> Chunk::value_of(const Symbol& slot) const {
  for (const auto& sv : val)
    if (sv.slot == slot) return sv.value;
  return std::nullopt;
}

Chunk make_chunk(const TypeTable& types, Symbol id, Symbol type, const std::vector<SlotValue>& values) {
  const auto& slots = types.slots(type);
  for (const auto& sv : values) {
    if (std::find(slots.begin(), slots.end(), sv.slot) == slots.end())
      throw std::invalid_argument("slot '" + sv.slot.str() + "' not in type '" + type.str() + "'");
  }
  Chunk c{std::move(id), std::move(type), {}};
  c.val.reserve(slots.size());
  for (const auto& s : slots) {
    auto it = std::find_if(values.begin(), values.end(), [&](const SlotValue& sv) { return sv.slot == s; });
    c.val.push_back({s, it == values.end() ? nil_symbol() : it->value});
  }
  return c;
}

const Chunk& nil_chunk() {
  static const Chunk nil{nil_symbol(), chunk_type_symbol(), {}};
  return nil;
}

ChunkStore ChunkStore::with_nil() {
  ChunkStore s;
  s.insert(nil_chunk());
  return s;
}

void ChunkStore::insert(Chunk chunk) {
  auto it = chunks_.find(chunk.id);
  if (it != chunks_.end()) {
    if (it->second != chunk) throw IdClash(chunk.id);
    return;
  }
  Symbol key = chunk.id;
  chunks_.emplace(std::move(key), std::move(chunk));
}

const Chunk* ChunkStore::find(const Symbol& id) const {
  auto it = chunks_.find(id);
  return it == chunks_.end() ? nullptr : &it->second;
}

const Chunk& ChunkStore::id_inverse(const Symbol& id) const {
  const Chunk* c = find(id);
  return c ? *c : nil_chunk();
}

const Chunk& id_inverse(const ChunkStore& store, const Symbol& x) { return store.id_inverse(x); }

MergeResult merge(const ChunkStore& left, const ChunkStore& right) {
  MergeResult r{left, {}};
  for (const auto& [id, chunk] : left) r.map.emplace(id, id);
  for (const auto& [id, chunk] : right) {
    r.store.insert(chunk);
    r.map.emplace(id, id);
  }
  return r;
}

std::optional<std::uint64_t> fresh_counter(const std::string& id) {
  const std::string prefix = kFreshPrefix;
  if (id.size() <= prefix.size() || id.compare(0, prefix.size(), prefix) != 0) return std::nullopt;
  std::uint64_t n = 0;
  const char* first = id.data() + prefix.size();
  const char* last = id.data() + id.size();
  auto [ptr, ec] = std::from_chars(first, last, n);
  if (ec != std::errc{} || ptr != last) return std::nullopt;
  return n;
}

bool is_fresh_id(const Symbol& id) { return fresh_counter(id.str()).has_value(); }

FreshIds FreshIds::after(const ChunkStore& store) {
  std::uint64_t next = 0;
  for (const auto& [id, chunk] : store) {
    if (auto n = fresh_counter(id.str())) next = std::max(next, *n + 1);
  }
  return FreshIds(next);
}

Symbol FreshIds::next() { return Symbol(kFreshPrefix + std::to_string(next_++)); }

}  // namespace actr
