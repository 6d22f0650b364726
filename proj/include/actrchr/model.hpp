#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "actrchr/chunk_store.hpp"
#include "actrchr/symbol.hpp"

namespace actr {

struct SourceSpan {
  std::string file;
  int line = 0;
  int column = 0;
  int end_line = 0;
  int end_column = 0;

  std::string str() const;

  // Spans are diagnostic decoration; they never take part in structural
  // equality of AST nodes.
  friend bool operator==(const SourceSpan&, const SourceSpan&) { return true; }
};

using Value = std::variant<Symbol, Variable>;

std::string to_string(const Value& v);
bool is_variable(const Value& v);

struct SlotValuePair {
  Symbol slot;
  Value value;
  SourceSpan span;

  friend bool operator==(const SlotValuePair&, const SlotValuePair&) = default;
};

/// Order used when pair lists are compared as sets.
bool pair_less(const SlotValuePair& a, const SlotValuePair& b);
/// Set equality of pair lists (duplicates collapse).
bool same_pairs(const std::vector<SlotValuePair>& a, const std::vector<SlotValuePair>& b);

struct BufferTest {
  Symbol buffer;
  Symbol type;
  std::vector<SlotValuePair> pairs;
  SourceSpan span;

  friend bool operator==(const BufferTest& a, const BufferTest& b) {
    return a.buffer == b.buffer && a.type == b.type && same_pairs(a.pairs, b.pairs);
  }
};

enum class ActionKind { Modify, Request };

struct Action {
  ActionKind kind;
  Symbol buffer;
  std::optional<Symbol> type;  // empty for modifications
  std::vector<SlotValuePair> pairs;
  SourceSpan span;

  friend bool operator==(const Action& a, const Action& b) {
    return a.kind == b.kind && a.buffer == b.buffer && a.type == b.type && same_pairs(a.pairs, b.pairs);
  }
};

struct Rule {
  Symbol name;
  std::vector<BufferTest> lhs;
  std::vector<Action> rhs;
  SourceSpan span;

  friend bool operator==(const Rule&, const Rule&) = default;
};

std::set<Variable> lhs_variables(const Rule& rule);
std::set<Variable> rhs_variables(const Rule& rule);
std::set<Variable> rule_variables(const Rule& rule);

struct TypeDecl {
  Symbol name;
  std::vector<Symbol> slots;
  SourceSpan span;

  friend bool operator==(const TypeDecl&, const TypeDecl&) = default;
};

struct ChunkDecl {
  Symbol id;
  Symbol type;
  std::vector<SlotValue> values;  // as written
  SourceSpan span;

  /// Slot order does not matter.
  friend bool operator==(const ChunkDecl& a, const ChunkDecl& b);
};

struct BufferDecl {
  Symbol name;
  Symbol chunk;
  bool pending = false;
  SourceSpan span;

  friend bool operator==(const BufferDecl&, const BufferDecl&) = default;
};

struct Model {
  std::vector<TypeDecl> types;
  std::vector<ChunkDecl> chunks;
  std::vector<Symbol> declarative;
  std::vector<BufferDecl> buffers;
  std::vector<Rule> rules;

  /// Throws std::invalid_argument when the type declarations are invalid.
  TypeTable type_table() const;
  std::vector<Symbol> buffer_names() const;

  friend bool operator==(const Model&, const Model&) = default;
};

/// Ground atom of the additional information, e.g. dm(b).
struct Atom {
  Symbol predicate;
  std::vector<Symbol> args;

  std::string str() const;

  friend bool operator==(const Atom&, const Atom&) = default;
  friend auto operator<=>(const Atom&, const Atom&) = default;
};

struct BufferContent {
  Symbol chunk;
  bool pending = false;  // delay flag: 1 = not yet visible to matching

  friend bool operator==(const BufferContent&, const BufferContent&) = default;
};

// <store; gamma; upsilon>. Time is constantly 0 in the abstract semantics and
// is not stored. gamma keeps the model's buffer declaration order.
struct AbstractState {
  ChunkStore store;
  std::vector<std::pair<Symbol, BufferContent>> gamma;
  std::vector<Atom> upsilon;  // multiset, kept sorted

  const BufferContent* buffer(const Symbol& b) const;
  BufferContent* buffer(const Symbol& b);

  friend bool operator==(const AbstractState&, const AbstractState&) = default;
};

/// Builds sigma_S: all declared chunks plus nil, the declared buffer
/// contents, and one dm(id) atom per declarative chunk.
AbstractState initial_state(const Model& model);

enum class DiagnosticKind {
  DuplicateType,
  DuplicateSlot,
  ConflictingType,
  UnknownType,
  UnknownSlot,
  MissingSlot,
  DuplicateChunk,
  UnknownChunk,
  DuplicateBuffer,
  UnknownBuffer,
  ReservedIdentifier,
  DuplicateRule,
  NewVariableOnRhs,
  DuplicateActionBuffer,
  UnknownDeclarative,
};

const char* to_string(DiagnosticKind kind);

struct Diagnostic {
  DiagnosticKind kind;
  std::string message;  // e.g. "NewVariableOnRhs(inc,Z)"
  SourceSpan span;

  std::string str() const;
};

/// Pure well-formedness check; empty result iff the model is well formed.
std::vector<Diagnostic> validate(const Model& model);

}  // namespace actr
