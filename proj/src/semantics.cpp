#include "actrchr/semantics.hpp"

#include <algorithm>
#include <cstdio>
#include <deque>
#include <set>
#include <sstream>
#include <unordered_map>

namespace actr {

std::string to_string(const Substitution& theta) {
  std::string s = "{";
  bool first = true;
  for (const auto& [v, c] : theta) {
    if (!first) s += ", ";
    first = false;
    s += v.str() + "->" + c.str();
  }
  return s + "}";
}

Effect neutral_effect() { return Effect{ChunkStore{}, {}, {}}; }

RequestHandler declarative_handler() {
  return [](const Symbol& type, const std::vector<SlotValue>& spec, const AbstractState& state) {
    std::vector<RequestAnswer> answers;
    std::set<Symbol> seen;
    for (const auto& atom : state.upsilon) {
      if (atom.predicate.str() != "dm" || atom.args.size() != 1) continue;
      const Symbol& id = atom.args.front();
      if (!seen.insert(id).second) continue;
      const Chunk* c = state.store.find(id);
      if (!c || c->type != type) continue;
      const bool agrees = std::all_of(spec.begin(), spec.end(), [&](const SlotValue& sv) {
        auto v = c->value_of(sv.slot);
        return v && state.store.id_inverse(*v).id == sv.value;
      });
      if (agrees) answers.push_back({c->type, c->val, true, {}});
    }
    return answers;
  };
}

ArchitectureConfig ArchitectureConfig::abstract_semantics(const std::vector<Symbol>& buffers, FailRequest fail) {
  ArchitectureConfig c;
  for (const auto& b : buffers) c.request_handlers.emplace(b, declarative_handler());
  c.fail_request = fail;
  return c;
}

// ---------------------------------------------------------------------------
// Set normal form

namespace {

Value substitute(const Value& v, const std::map<Variable, Value>& theta) {
  if (auto var = std::get_if<Variable>(&v)) {
    auto it = theta.find(*var);
    if (it != theta.end()) return it->second;
  }
  return v;
}

void substitute(Rule& r, const std::map<Variable, Value>& theta) {
  for (auto& t : r.lhs)
    for (auto& p : t.pairs) p.value = substitute(p.value, theta);
  for (auto& a : r.rhs)
    for (auto& p : a.pairs) p.value = substitute(p.value, theta);
}

void dedup_pairs(std::vector<SlotValuePair>& pairs) {
  std::vector<SlotValuePair> out;
  for (auto& p : pairs) {
    bool dup = std::any_of(out.begin(), out.end(), [&](const SlotValuePair& q) { return q.slot == p.slot && q.value == p.value; });
    if (!dup) out.push_back(std::move(p));
  }
  pairs = std::move(out);
}

class FreshVars {
public:
  explicit FreshVars(const Rule& r) : used_(rule_variables(r)) {}

  Variable next() {
    for (;;) {
      Variable v("V#" + std::to_string(n_++));
      if (used_.insert(v).second) return v;
    }
  }

private:
  std::set<Variable> used_;
  std::size_t n_ = 0;
};

}  // namespace

bool is_set_normal_form(const Rule& rule, const TypeTable& types) {
  for (const auto& t : rule.lhs) {
    if (!types.contains(t.type)) return false;
    const auto& slots = types.slots(t.type);
    if (t.pairs.size() != slots.size()) return false;
    for (const auto& s : slots) {
      auto n = std::count_if(t.pairs.begin(), t.pairs.end(), [&](const SlotValuePair& p) { return p.slot == s; });
      if (n != 1) return false;
    }
  }
  return true;
}

std::optional<Rule> set_normal_form(const Rule& rule, const TypeTable& types) {
  Rule r = rule;
  FreshVars fresh(rule);
  // Collapse slots with several values, one substitution at a time, until no
  // test has a slot with two distinct values left.
  for (bool changed = true; changed;) {
    changed = false;
    for (auto& t : r.lhs) {
      dedup_pairs(t.pairs);
      for (std::size_t i = 0; i < t.pairs.size() && !changed; ++i) {
        std::vector<Value> values;
        for (const auto& p : t.pairs)
          if (p.slot == t.pairs[i].slot) values.push_back(p.value);
        if (values.size() < 2) continue;
        std::set<Symbol> constants;
        for (const auto& v : values)
          if (auto c = std::get_if<Symbol>(&v)) constants.insert(*c);
        if (constants.size() > 1) return std::nullopt;
        const Value target = constants.empty() ? Value(fresh.next()) : Value(*constants.begin());
        std::map<Variable, Value> theta;
        for (const auto& v : values)
          if (auto var = std::get_if<Variable>(&v)) theta.emplace(*var, target);
        substitute(r, theta);
        changed = true;
      }
      if (changed) break;
    }
  }
  for (auto& t : r.lhs) {
    dedup_pairs(t.pairs);
    if (!types.contains(t.type)) continue;
    std::vector<SlotValuePair> ordered;
    for (const auto& s : types.slots(t.type)) {
      auto it = std::find_if(t.pairs.begin(), t.pairs.end(), [&](const SlotValuePair& p) { return p.slot == s; });
      if (it != t.pairs.end()) ordered.push_back(*it);
      else ordered.push_back({s, fresh.next(), t.span});
    }
    t.pairs = std::move(ordered);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Matching and selection

std::optional<Substitution> match_rule(const Rule& rule, const AbstractState& state) {
  Substitution theta;
  for (const auto& test : rule.lhs) {
    const BufferContent* content = state.buffer(test.buffer);
    if (!content || content->pending) return std::nullopt;
    const Chunk& chunk = state.store.id_inverse(content->chunk);
    if (chunk.type != test.type) return std::nullopt;
    for (const auto& p : test.pairs) {
      auto raw = chunk.value_of(p.slot);
      if (!raw) return std::nullopt;
      const Symbol& actual = state.store.id_inverse(*raw).id;
      if (auto c = std::get_if<Symbol>(&p.value)) {
        if (*c != actual) return std::nullopt;
      } else {
        const auto& var = std::get<Variable>(p.value);
        auto [it, inserted] = theta.emplace(var, actual);
        if (!inserted && it->second != actual) return std::nullopt;
      }
    }
  }
  return theta;
}

std::vector<Selection> select(const AbstractState& state, const std::vector<Rule>& rules) {
  std::vector<Selection> out;
  for (std::size_t i = 0; i < rules.size(); ++i)
    if (auto theta = match_rule(rules[i], state)) out.push_back({i, std::move(*theta)});
  return out;
}

// ---------------------------------------------------------------------------
// Interpretation

Action instantiate(const Action& action, const Substitution& theta) {
  Action a = action;
  for (auto& p : a.pairs) {
    if (auto v = std::get_if<Variable>(&p.value)) {
      auto it = theta.find(*v);
      if (it == theta.end()) throw std::logic_error("unbound variable '" + v->str() + "' in action on " + a.buffer.str());
      p.value = it->second;
    }
  }
  return a;
}

namespace {

std::vector<SlotValue> ground_pairs(const Action& a) {
  std::vector<SlotValue> out;
  for (const auto& p : a.pairs) {
    auto c = std::get_if<Symbol>(&p.value);
    if (!c) throw std::logic_error("action on " + a.buffer.str() + " is not ground");
    out.push_back({p.slot, *c});
  }
  return out;
}

}  // namespace

std::vector<Effect> interpret_modification(const Action& action, const AbstractState& state, FreshIds& ids) {
  const BufferContent* content = state.buffer(action.buffer);
  if (!content) throw MissingIncumbent(action.buffer);
  const Chunk& incumbent = state.store.id_inverse(content->chunk);
  const auto pairs = ground_pairs(action);
  Chunk c{ids.next(), incumbent.type, incumbent.val};
  for (auto& sv : c.val) {
    auto it = std::find_if(pairs.begin(), pairs.end(), [&](const SlotValue& p) { return p.slot == sv.slot; });
    if (it != pairs.end()) sv.value = state.store.id_inverse(it->value).id;
  }
  Effect e = neutral_effect();
  e.gamma.emplace_back(action.buffer, BufferContent{c.id, false});
  e.delta.insert(std::move(c));
  return {std::move(e)};
}

std::vector<Effect> interpret_request(const Action& action, const AbstractState& state,
                                      const ArchitectureConfig& config, FreshIds& ids) {
  auto handler = config.request_handlers.find(action.buffer);
  if (handler == config.request_handlers.end() || !handler->second) throw NoHandler(action.buffer);
  const Symbol type = action.type.value_or(chunk_type_symbol());
  auto answers = handler->second(type, ground_pairs(action), state);
  if (answers.empty() && config.fail_request == FailRequest::Nil)
    answers.push_back({chunk_type_symbol(), {}, true, {}});
  std::vector<Effect> out;
  for (auto& ans : answers) {
    Chunk c{ids.next(), ans.type, std::move(ans.val)};
    Effect e = neutral_effect();
    e.gamma.emplace_back(action.buffer, BufferContent{c.id, ans.delayed});
    e.delta.insert(std::move(c));
    e.upsilon = std::move(ans.upsilon);
    out.push_back(std::move(e));
  }
  return out;
}

Effect combine_effects(const Effect& e, const Effect& f) {
  for (const auto& [b, content] : f.gamma) {
    for (const auto& [b2, c2] : e.gamma)
      if (b == b2) throw DomainOverlap(b);
  }
  auto merged = merge(e.delta, f.delta);
  Effect out{std::move(merged.store), e.gamma, e.upsilon};
  for (const auto& [b, content] : f.gamma) {
    auto it = merged.map.find(content.chunk);
    out.gamma.emplace_back(b, BufferContent{it == merged.map.end() ? content.chunk : it->second, content.pending});
  }
  out.upsilon.insert(out.upsilon.end(), f.upsilon.begin(), f.upsilon.end());
  return out;
}

std::vector<Effect> combine_effects(const std::vector<Effect>& e, const std::vector<Effect>& f) {
  std::vector<Effect> out;
  out.reserve(e.size() * f.size());
  for (const auto& x : e)
    for (const auto& y : f) out.push_back(combine_effects(x, y));
  return out;
}

std::vector<Effect> interpret_rule(const Rule& rule, const Substitution& theta, const AbstractState& state,
                                   const ArchitectureConfig& config, FreshIds& ids) {
  std::vector<Effect> acc{neutral_effect()};
  for (const auto& action : rule.rhs) {
    const Action ground = instantiate(action, theta);
    auto effects = ground.kind == ActionKind::Modify ? interpret_modification(ground, state, ids)
                                                     : interpret_request(ground, state, config, ids);
    acc = combine_effects(acc, effects);
  }
  if (config.apply_hook) {
    for (auto& e : acc) e = config.apply_hook(std::move(e));
  }
  return acc;
}

AbstractState apply_transition(const AbstractState& state, const Effect& effect) {
  auto merged = merge(state.store, effect.delta);
  AbstractState next{std::move(merged.store), state.gamma, state.upsilon};
  for (const auto& [b, content] : effect.gamma) {
    BufferContent* slot = next.buffer(b);
    if (!slot) throw std::logic_error("effect touches undeclared buffer '" + b.str() + "'");
    auto it = merged.map.find(content.chunk);
    *slot = BufferContent{it == merged.map.end() ? content.chunk : it->second, content.pending};
  }
  next.upsilon.insert(next.upsilon.end(), effect.upsilon.begin(), effect.upsilon.end());
  std::sort(next.upsilon.begin(), next.upsilon.end());
  return next;
}

std::vector<AbstractState> no_rule_transitions(const AbstractState& state) {
  std::vector<AbstractState> out;
  for (std::size_t i = 0; i < state.gamma.size(); ++i) {
    if (!state.gamma[i].second.pending) continue;
    AbstractState next = state;
    next.gamma[i].second.pending = false;
    out.push_back(std::move(next));
  }
  return out;
}

std::string Label::str() const { return kind == Kind::No ? "no" : "apply(" + rule->str() + ")"; }

// ---------------------------------------------------------------------------
// Semantics

Semantics::Semantics(const Model& model) : Semantics(model, ArchitectureConfig::abstract_semantics(model.buffer_names())) {}

Semantics::Semantics(const Model& model, ArchitectureConfig config)
    : types_(model.type_table()), buffers_(model.buffer_names()), config_(std::move(config)) {
  for (const auto& r : model.rules) {
    if (auto n = set_normal_form(r, types_)) rules_.push_back(std::move(*n));
    else dropped_.push_back(r.name);
  }
}

std::vector<Effect> Semantics::interpret_rule(const Rule& rule, const Substitution& theta,
                                              const AbstractState& state) const {
  FreshIds ids = FreshIds::after(state.store);
  return actr::interpret_rule(rule, theta, state, config_, ids);
}

std::vector<Transition> Semantics::successors(const AbstractState& state) const {
  std::vector<Transition> out;
  for (const auto& sel : select(state)) {
    const Rule& r = rules_[sel.rule];
    for (const auto& e : interpret_rule(r, sel.theta, state)) out.push_back({Label::apply(r.name), apply_transition(state, e)});
  }
  for (auto& s : no_rule_transitions(state)) out.push_back({Label::no(), std::move(s)});
  return out;
}

TransitionGraph Semantics::explore(const AbstractState& initial, std::size_t depth, DedupMode mode) const {
  TransitionGraph g;
  std::unordered_map<std::string, std::size_t> index;
  auto key = [&](const AbstractState& s) { return mode == DedupMode::Exact ? to_string(s) : to_string(canonical(s)); };
  auto add = [&](AbstractState s, std::size_t d) -> std::size_t {
    auto k = key(s);
    auto it = index.find(k);
    if (it != index.end()) return it->second;
    std::string h = state_hash(s);
    g.nodes.push_back({std::move(s), d, std::move(h)});
    index.emplace(std::move(k), g.nodes.size() - 1);
    return g.nodes.size() - 1;
  };
  add(initial, 0);
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const std::size_t d = g.nodes[i].depth;
    auto succ = successors(g.nodes[i].state);
    if (d >= depth) {
      if (!succ.empty()) g.truncated = true;
      continue;
    }
    for (auto& t : succ) {
      const std::size_t to = add(std::move(t.target), d + 1);
      g.edges.push_back({i, to, t.label});
    }
  }
  return g;
}

std::vector<Transition> successors(const AbstractState& state, const Model& model) {
  return Semantics(model).successors(state);
}

// ---------------------------------------------------------------------------
// Canonical form and printing

namespace {

class Renamer {
public:
  explicit Renamer(const AbstractState& s) : s_(s) {}

  std::map<Symbol, Symbol> run() {
    for (const auto& [b, content] : s_.gamma) visit(content.chunk);
    for (;;) {
      const Chunk* best = nullptr;
      std::string best_sig;
      for (const auto& [id, chunk] : s_.store) {
        if (!is_fresh_id(id) || names_.count(id)) continue;
        std::string sig = signature(chunk);
        if (!best || sig < best_sig) {
          best = &chunk;
          best_sig = std::move(sig);
        }
      }
      if (!best) break;
      visit(best->id);
    }
    for (const auto& atom : s_.upsilon)
      for (const auto& a : atom.args) visit(a);
    return names_;
  }

private:
  void visit(const Symbol& id) {
    if (!is_fresh_id(id) || names_.count(id)) return;
    names_.emplace(id, Symbol(kFreshPrefix + std::to_string(names_.size())));
    if (const Chunk* c = s_.store.find(id))
      for (const auto& sv : c->val) visit(sv.value);
  }

  std::string signature(const Chunk& c) const {
    std::string s = c.type.str() + "{";
    for (const auto& sv : c.val) {
      s += sv.slot.str() + ":";
      if (!is_fresh_id(sv.value)) s += sv.value.str();
      else if (auto it = names_.find(sv.value); it != names_.end()) s += it->second.str();
      else s += "?";
      s += ",";
    }
    return s + "}";
  }

  const AbstractState& s_;
  std::map<Symbol, Symbol> names_;
};

std::string chunk_text(const Chunk& c) {
  std::string s = c.id.str() + ":" + c.type.str() + "{";
  for (std::size_t i = 0; i < c.val.size(); ++i) {
    if (i) s += ",";
    s += c.val[i].slot.str() + ":" + c.val[i].value.str();
  }
  return s + "}";
}

std::string store_text(const ChunkStore& store) {
  std::string s = "[";
  bool first = true;
  for (const auto& [id, c] : store) {
    if (!first) s += ", ";
    first = false;
    s += chunk_text(c);
  }
  return s + "]";
}

std::string gamma_text(const std::vector<std::pair<Symbol, BufferContent>>& gamma) {
  std::string s;
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    if (i) s += ", ";
    s += gamma[i].first.str() + "=" + gamma[i].second.chunk.str() + (gamma[i].second.pending ? "(pending)" : "");
  }
  return s;
}

std::string atoms_text(const std::vector<Atom>& atoms) {
  std::string s;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (i) s += ", ";
    s += atoms[i].str();
  }
  return s;
}

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

AbstractState canonical(const AbstractState& state) {
  const auto names = Renamer(state).run();
  auto rename = [&](const Symbol& id) {
    auto it = names.find(id);
    return it == names.end() ? id : it->second;
  };
  AbstractState out{ChunkStore{}, {}, {}};
  for (const auto& [id, c] : state.store) {
    Chunk r{rename(c.id), c.type, c.val};
    for (auto& sv : r.val) sv.value = rename(sv.value);
    out.store.insert(std::move(r));
  }
  for (const auto& [b, content] : state.gamma) out.gamma.emplace_back(b, BufferContent{rename(content.chunk), content.pending});
  for (const auto& atom : state.upsilon) {
    Atom a = atom;
    for (auto& x : a.args) x = rename(x);
    out.upsilon.push_back(std::move(a));
  }
  std::sort(out.upsilon.begin(), out.upsilon.end());
  return out;
}

std::string to_string(const AbstractState& state) {
  return "store: " + store_text(state.store) + "\ngamma: " + gamma_text(state.gamma) +
         "\nupsilon: " + atoms_text(state.upsilon) + "\n";
}

std::string to_string(const Effect& effect) {
  return "delta*: " + store_text(effect.delta) + "\ngamma*: " + gamma_text(effect.gamma) +
         "\nupsilon*: " + atoms_text(effect.upsilon) + "\n";
}

std::string state_hash(const AbstractState& state) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : to_string(canonical(state))) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string to_dot(const TransitionGraph& graph) {
  std::ostringstream os;
  os << "digraph actr {\n  node [shape=box, fontname=\"monospace\"];\n";
  for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
    const auto& n = graph.nodes[i];
    os << "  n" << i << " [label=\"" << n.hash << "\\n" << dot_escape(gamma_text(n.state.gamma)) << "\"];\n";
  }
  for (const auto& e : graph.edges) os << "  n" << e.from << " -> n" << e.to << " [label=\"" << dot_escape(e.label.str()) << "\"];\n";
  os << "}\n";
  return os.str();
}

std::string to_trace(const TransitionGraph& graph) {
  std::ostringstream os;
  std::size_t e = 0;
  for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
    if (e >= graph.edges.size() || graph.edges[e].from != i) continue;
    os << "state " << graph.nodes[i].hash << '\n';
    for (; e < graph.edges.size() && graph.edges[e].from == i; ++e) {
      const auto& to = graph.nodes[graph.edges[e].to];
      os << "step " << graph.nodes[i].depth + 1 << ": " << graph.edges[e].label.str() << " -> " << to.hash << '\n';
    }
  }
  if (graph.truncated) os << "truncated\n";
  return os.str();
}

}  // namespace actr
