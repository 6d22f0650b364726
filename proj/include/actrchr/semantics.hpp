#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "actrchr/chunk_store.hpp"
#include "actrchr/model.hpp"

namespace actr {

using Substitution = std::map<Variable, Symbol>;

std::string to_string(const Substitution& theta);

// (Delta*, gamma*, upsilon*): a partial store with fresh ids, the new contents
// of the touched buffers, and the atoms added to the additional information.
struct Effect {
  ChunkStore delta;
  std::vector<std::pair<Symbol, BufferContent>> gamma;
  std::vector<Atom> upsilon;

  friend bool operator==(const Effect&, const Effect&) = default;
};

/// (empty store, empty gamma, true)
Effect neutral_effect();

class MissingIncumbent : public std::logic_error {
public:
  explicit MissingIncumbent(const Symbol& b) : std::logic_error("buffer '" + b.str() + "' holds no chunk") {}
};

class NoHandler : public std::runtime_error {
public:
  explicit NoHandler(const Symbol& b) : std::runtime_error("no request handler for buffer '" + b.str() + "'") {}
};

class DomainOverlap : public std::logic_error {
public:
  explicit DomainOverlap(const Symbol& b) : std::logic_error("two effects touch buffer '" + b.str() + "'") {}
};

/// One possible answer of a module to a request: the chunk content (the
/// engine assigns a fresh id), whether it arrives with a delay, and the atoms
/// the module adds to the additional information.
struct RequestAnswer {
  Symbol type;
  std::vector<SlotValue> val;
  bool delayed = true;
  std::vector<Atom> upsilon;
};

using RequestHandler =
    std::function<std::vector<RequestAnswer>(const Symbol& type, const std::vector<SlotValue>& spec, const AbstractState& state)>;

/// All chunks x with dm(x) in upsilon whose type is `type` and whose slots
/// agree with `spec`; each arrives delayed and adds no atoms.
RequestHandler declarative_handler();

// What to answer when a request handler finds nothing.
enum class FailRequest {
  Nil,    // a fresh chunk of type `chunk`, delayed
  Stuck,  // no effect at all: the rule cannot fire
};

// The parameters the abstract semantics leaves to the architecture. Rule delay
// is 0 and the no-rule transition reveals one pending buffer.
struct ArchitectureConfig {
  std::map<Symbol, RequestHandler> request_handlers;
  std::function<Effect(Effect)> apply_hook;  // identity when empty
  FailRequest fail_request = FailRequest::Nil;

  /// The declarative handler on every buffer, identity apply hook.
  static ArchitectureConfig abstract_semantics(const std::vector<Symbol>& buffers,
                                               FailRequest fail = FailRequest::Nil);
};

bool is_set_normal_form(const Rule& rule, const TypeTable& types);

/// Every test lists every slot of its type exactly once. Returns nullopt when
/// the rule can never fire (two different constants on one slot).
std::optional<Rule> set_normal_form(const Rule& rule, const TypeTable& types);

/// Smallest substitution under which every buffer test matches a visible
/// chunk; nullopt when some test fails.
std::optional<Substitution> match_rule(const Rule& rule, const AbstractState& state);

struct Selection {
  std::size_t rule;  // index into the rule list
  Substitution theta;
};

std::vector<Selection> select(const AbstractState& state, const std::vector<Rule>& rules);

/// Applies theta to the action's pairs; throws std::logic_error when a
/// variable is left unbound.
Action instantiate(const Action& action, const Substitution& theta);

std::vector<Effect> interpret_modification(const Action& action, const AbstractState& state, FreshIds& ids);

std::vector<Effect> interpret_request(const Action& action, const AbstractState& state,
                                      const ArchitectureConfig& config, FreshIds& ids);

/// e ⊔ f. The partial stores must have disjoint ids.
Effect combine_effects(const Effect& e, const Effect& f);
/// Pairwise lifting to effect sets.
std::vector<Effect> combine_effects(const std::vector<Effect>& e, const std::vector<Effect>& f);

/// Ids are drawn from `ids`, so effects of different actions are renamed apart.
std::vector<Effect> interpret_rule(const Rule& rule, const Substitution& theta, const AbstractState& state,
                                   const ArchitectureConfig& config, FreshIds& ids);

AbstractState apply_transition(const AbstractState& state, const Effect& effect);

/// One successor per pending buffer, with that buffer made visible.
std::vector<AbstractState> no_rule_transitions(const AbstractState& state);

struct Label {
  enum class Kind { Apply, No };
  Kind kind = Kind::No;
  std::optional<Symbol> rule;

  static Label apply(Symbol rule) { return {Kind::Apply, std::move(rule)}; }
  static Label no() { return {Kind::No, std::nullopt}; }
  std::string str() const;  // "apply(inc)" or "no"

  friend bool operator==(const Label&, const Label&) = default;
};

struct Transition {
  Label label;
  AbstractState target;
};

enum class DedupMode { Exact, Canonical };

struct TransitionGraph {
  struct Node {
    AbstractState state;
    std::size_t depth = 0;
    std::string hash;
  };
  struct Edge {
    std::size_t from = 0;
    std::size_t to = 0;
    Label label;
  };

  std::vector<Node> nodes;
  std::vector<Edge> edges;
  bool truncated = false;  // some node at the depth bound still had successors
};

// The abstract semantics of one model: normalized rules plus architecture.
class Semantics {
public:
  explicit Semantics(const Model& model);
  Semantics(const Model& model, ArchitectureConfig config);

  const TypeTable& types() const { return types_; }
  const std::vector<Symbol>& buffers() const { return buffers_; }
  /// Rules in set normal form, declaration order, Dropped ones removed.
  const std::vector<Rule>& rules() const { return rules_; }
  const std::vector<Symbol>& dropped() const { return dropped_; }
  const ArchitectureConfig& config() const { return config_; }

  std::vector<Selection> select(const AbstractState& state) const { return actr::select(state, rules_); }

  /// Fresh ids start after the largest fresh id in the state's store.
  std::vector<Effect> interpret_rule(const Rule& rule, const Substitution& theta, const AbstractState& state) const;

  std::vector<Transition> successors(const AbstractState& state) const;

  TransitionGraph explore(const AbstractState& initial, std::size_t depth, DedupMode mode) const;

private:
  TypeTable types_;
  std::vector<Symbol> buffers_;
  std::vector<Rule> rules_;
  std::vector<Symbol> dropped_;
  ArchitectureConfig config_;
};

/// All successors of `state` under the model's normalized rules.
std::vector<Transition> successors(const AbstractState& state, const Model& model);

/// Renames fresh ids canonically: chunks reachable from the buffers (in gamma
/// order, then slot order) first, remaining fresh chunks by content.
AbstractState canonical(const AbstractState& state);

std::string to_string(const AbstractState& state);
std::string to_string(const Effect& effect);

/// 16 hex digits of FNV-1a over the canonical text of the state.
std::string state_hash(const AbstractState& state);

std::string to_dot(const TransitionGraph& graph);
std::string to_trace(const TransitionGraph& graph);

}  // namespace actr
