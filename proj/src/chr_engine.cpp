#include "actrchr/chr_engine.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace actr::chr {

namespace {

const Term& false_term() {
  static const Term f = Term::atom("false");
  return f;
}

bool is_chunk_list(const Term& t) {
  if (!t.is_list() || t.args().empty()) return false;
  return std::all_of(t.args().begin(), t.args().end(), [](const Term& e) { return e.is("chunk", 3); });
}

void push_unique(std::vector<Term>& v, const Term& t) {
  if (std::find(v.begin(), v.end(), t) == v.end()) v.push_back(t);
}

std::vector<Term> sorted_unique(std::vector<Term> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace

bool ChrState::failed() const {
  return std::find(builtins.begin(), builtins.end(), false_term()) != builtins.end();
}

ChrState ChrState::failed_state() { return ChrState{{}, {false_term()}, {}}; }

std::string to_string(const ChrRule& rule) {
  std::string s = rule.name + " @ ";
  if (!rule.kept.empty()) s += join(rule.kept, ", ") + " \\ ";
  s += join(rule.removed, ", ") + " <=> ";
  if (!rule.guard.empty()) s += join(rule.guard, ", ") + " | ";
  std::vector<Term> body = rule.body_user;
  body.insert(body.end(), rule.body_builtins.begin(), rule.body_builtins.end());
  s += body.empty() ? "true" : join(body, ", ");
  return s;
}

std::string print_program(const std::vector<ChrRule>& program) {
  std::string s;
  for (const auto& r : program) s += to_string(r) + ".\n";
  return s;
}

std::string to_string(const ChrState& state) {
  std::string s = "<" + join(state.goal, ", ") + " ; ";
  s += state.builtins.empty() ? "true" : join(state.builtins, " /\\ ");
  s += " ; {";
  bool first = true;
  for (const auto& g : state.globals) {
    if (!first) s += ",";
    s += g;
    first = false;
  }
  return s + "}>";
}

// ---------------------------------------------------------------------------
// Encodings

Term encode_chunk(const Chunk& chunk) {
  std::vector<Term> vals;
  for (const auto& sv : chunk.val)
    vals.push_back(Term::tuple({Term::atom(sv.slot.str()), Term::atom(sv.value.str())}));
  return Term::compound("chunk", {Term::atom(chunk.id.str()), Term::atom(chunk.type.str()), Term::list(std::move(vals))});
}

Term encode_store(const ChunkStore& store) {
  std::vector<Term> out;
  for (const auto& [id, c] : store) out.push_back(encode_chunk(c));
  return Term::list(std::move(out));
}

ChunkStore decode_store(const Term& list) {
  if (!list.is_list()) throw std::invalid_argument("not a chunk list: " + to_string(list));
  ChunkStore store;
  for (const auto& e : list.args()) {
    if (!e.is("chunk", 3) || !e.args()[0].is_atom() || !e.args()[1].is_atom() || !e.args()[2].is_list())
      throw std::invalid_argument("not a chunk term: " + to_string(e));
    Chunk c{Symbol(e.args()[0].name()), Symbol(e.args()[1].name()), {}};
    for (const auto& p : e.args()[2].args()) {
      if (!p.is("", 2) || !p.args()[0].is_atom() || !p.args()[1].is_atom())
        throw std::invalid_argument("not a slot-value pair: " + to_string(p));
      c.val.push_back({Symbol(p.args()[0].name()), Symbol(p.args()[1].name())});
    }
    store.insert(std::move(c));
  }
  return store;
}

// ---------------------------------------------------------------------------
// Builtin solver

bool is_evaluable(const Term& c) {
  return c.is("=", 2) || c.is(">", 2) || c.is("in", 2) || c.is("action", 6) || c.is("merge", 2) || c.is("map", 4) ||
         (c.is_atom() && (c.name() == "true" || c.name() == "false"));
}

namespace {

bool ground_under(const Term& t, const Bindings& b) { return resolve(t, b).is_ground(); }

bool ready(const Term& c, const Bindings& b) {
  if (c.is("=", 2) || c.is_atom()) return true;
  if (c.is(">", 2)) return ground_under(c.args()[0], b) && ground_under(c.args()[1], b);
  if (c.is("in", 2)) return ground_under(c.args()[1], b);
  if (c.is("merge", 2)) return ground_under(c.args()[0], b);
  if (c.is("action", 6) || c.is("map", 4))
    return ground_under(c.args()[0], b) && ground_under(c.args()[1], b) && ground_under(c.args()[2], b);
  return ground_under(c, b);
}

std::string fresh_id(Environment& env) { return std::string(kFreshPrefix) + std::to_string(env.next_fresh++); }

const Term* find_chunk(const Term& store, const std::string& id) {
  for (const auto& c : store.args())
    if (c.is("chunk", 3) && c.args()[0].is_atom() && c.args()[0].name() == id) return &c;
  return nullptr;
}

// Identifier of the chunk a value denotes: itself when stored, nil otherwise.
std::string denote(const Term& store, const Term& value) {
  if (value.is_atom() && find_chunk(store, value.name())) return value.name();
  return nil_symbol().str();
}

std::vector<Environment> bind_result(Environment env, const Term& chunk, const Term& dres, const Term& cres,
                                     const Term& eres, int delay) {
  if (!unify(dres, Term::list({chunk}), env.bindings)) return {};
  if (!unify(cres, chunk.args()[0], env.bindings)) return {};
  if (!unify(eres, Term::integer(delay), env.bindings)) return {};
  return {std::move(env)};
}

std::vector<Environment> eval_action(const Term& c, const Environment& env, const SolverContext& ctx) {
  const Term alpha = resolve(c.args()[0], env.bindings);
  const Term store = resolve(c.args()[1], env.bindings);
  const Term cogstate = resolve(c.args()[2], env.bindings);
  const Term& dres = c.args()[3];
  const Term& cres = c.args()[4];
  const Term& eres = c.args()[5];
  if (!store.is_list() || !cogstate.is_list()) return {};

  if (alpha.is("=", 3)) {
    const std::string& buffer = alpha.args()[0].name();
    const Term* entry = nullptr;
    for (const auto& g : cogstate.args())
      if (g.is("", 3) && g.args()[0].is_atom() && g.args()[0].name() == buffer) entry = &g;
    if (!entry) throw std::logic_error("action on unknown buffer '" + buffer + "'");
    const Term* incumbent = find_chunk(store, entry->args()[1].name());
    Term type = incumbent ? incumbent->args()[1] : Term::atom(chunk_type_symbol().str());
    std::vector<Term> vals = incumbent ? incumbent->args()[2].args() : std::vector<Term>{};
    for (auto& sv : vals) {
      for (const auto& p : alpha.args()[2].args()) {
        if (p.args()[0] == sv.args()[0]) {
          sv = Term::tuple({sv.args()[0], Term::atom(denote(store, p.args()[1]))});
          break;
        }
      }
    }
    Environment e = env;
    Term chunk = Term::compound("chunk", {Term::atom(fresh_id(e)), type, Term::list(std::move(vals))});
    return bind_result(std::move(e), chunk, dres, cres, eres, 0);
  }

  if (alpha.is("+", 3)) {
    const Term& type = alpha.args()[1];
    std::vector<Term> candidates;
    for (const auto& f : ctx.facts)
      if (f.is("dm", 1) && f.args()[0].is_atom()) push_unique(candidates, f.args()[0]);
    std::sort(candidates.begin(), candidates.end());
    std::vector<Environment> out;
    for (const auto& x : candidates) {
      const Term* chunk = find_chunk(store, x.name());
      if (!chunk || chunk->args()[1] != type) continue;
      bool agrees = true;
      for (const auto& p : alpha.args()[2].args()) {
        const Term* have = nullptr;
        for (const auto& sv : chunk->args()[2].args())
          if (sv.args()[0] == p.args()[0]) have = &sv;
        if (!have || denote(store, have->args()[1]) != p.args()[1].name()) {
          agrees = false;
          break;
        }
      }
      if (!agrees) continue;
      Environment e = env;
      Term copy = Term::compound("chunk", {Term::atom(fresh_id(e)), type, chunk->args()[2]});
      for (auto& r : bind_result(std::move(e), copy, dres, cres, eres, 1)) out.push_back(std::move(r));
    }
    if (out.empty() && ctx.fail_request == FailRequest::Nil) {
      Environment e = env;
      Term empty = Term::compound("chunk", {Term::atom(fresh_id(e)), Term::atom(chunk_type_symbol().str()), Term::list({})});
      return bind_result(std::move(e), empty, dres, cres, eres, 1);
    }
    return out;
  }
  throw std::logic_error("malformed action term: " + to_string(alpha));
}

std::vector<Environment> eval_merge(const Term& c, const Environment& env) {
  const Term stores = resolve(c.args()[0], env.bindings);
  if (!stores.is_list()) return {};
  MergeResult acc;
  try {
    for (const auto& s : stores.args()) acc = merge(acc.store, decode_store(s));
  } catch (const IdClash&) {
    return {};
  }
  Environment e = env;
  if (!unify(c.args()[1], encode_store(acc.store), e.bindings)) return {};
  return {std::move(e)};
}

std::vector<Environment> eval_map(const Term& c, const Environment& env) {
  const Term d = resolve(c.args()[0], env.bindings);
  const Term dres = resolve(c.args()[1], env.bindings);
  const Term id = resolve(c.args()[2], env.bindings);
  if (!id.is_atom()) return {};
  MergeResult m;
  try {
    m = merge(decode_store(d), decode_store(dres));
  } catch (const IdClash&) {
    return {};
  }
  auto it = m.map.find(Symbol(id.name()));
  const std::string target = it != m.map.end() ? it->second.str() : nil_symbol().str();
  Environment e = env;
  if (!unify(c.args()[3], Term::atom(target), e.bindings)) return {};
  return {std::move(e)};
}

std::vector<Environment> eval(const Term& c, const Environment& env, const SolverContext& ctx, bool ask) {
  if (c.is_atom() && c.name() == "true") return {env};
  if (c.is_atom() && c.name() == "false") return {};
  if (c.is("=", 2)) {
    Environment e = env;
    if (!unify(c.args()[0], c.args()[1], e.bindings)) return {};
    return {std::move(e)};
  }
  if (c.is(">", 2)) {
    const Term a = resolve(c.args()[0], env.bindings);
    const Term b = resolve(c.args()[1], env.bindings);
    if (!a.is_int() || !b.is_int()) throw Undecided("comparison of non-numbers: " + to_string(c));
    if (a.value() > b.value()) return {env};
    return {};
  }
  if (c.is("in", 2)) {
    const Term list = resolve(c.args()[1], env.bindings);
    if (!list.is_list()) return {};
    std::vector<Environment> out;
    for (const auto& m : list.args()) {
      Environment e = env;
      if (unify(c.args()[0], m, e.bindings)) out.push_back(std::move(e));
    }
    return out;
  }
  if (c.is("action", 6)) return eval_action(c, env, ctx);
  if (c.is("merge", 2)) return eval_merge(c, env);
  if (c.is("map", 4)) return eval_map(c, env);

  const Term fact = resolve(c, env.bindings);
  if (ask) {
    const bool known = std::find(ctx.facts.begin(), ctx.facts.end(), fact) != ctx.facts.end() ||
                       std::find(env.told.begin(), env.told.end(), fact) != env.told.end();
    if (known) return {env};
    return {};
  }
  Environment e = env;
  push_unique(e.told, fact);
  return {std::move(e)};
}

void solve_rec(std::vector<Term> pending, const Environment& env, const SolverContext& ctx, bool ask,
               std::vector<Environment>& out) {
  if (pending.empty()) {
    out.push_back(env);
    return;
  }
  auto it = std::find_if(pending.begin(), pending.end(), [&](const Term& c) { return ready(c, env.bindings); });
  if (it == pending.end()) {
    std::vector<Term> residual;
    for (const auto& c : pending) residual.push_back(resolve(c, env.bindings));
    throw Undecided("cannot decide builtins: " + join(residual, " /\\ "));
  }
  const Term c = *it;
  pending.erase(it);
  for (const auto& e : eval(c, env, ctx, ask)) solve_rec(pending, e, ctx, ask, out);
}

}  // namespace

std::vector<Environment> solve_builtins(const std::vector<Term>& conjunction, const Environment& env,
                                        const SolverContext& context, bool ask) {
  std::vector<Environment> out;
  solve_rec(conjunction, env, context, ask, out);
  return out;
}

std::uint64_t next_fresh_counter(const ChrState& state) {
  std::uint64_t next = 0;
  std::function<void(const Term&)> scan = [&](const Term& t) {
    if (t.is_atom()) {
      if (auto n = fresh_counter(t.name())) next = std::max(next, *n + 1);
      return;
    }
    for (const auto& a : t.args()) scan(a);
  };
  for (const auto& t : state.goal) scan(t);
  for (const auto& t : state.builtins) scan(t);
  return next;
}

// ---------------------------------------------------------------------------
// Simplification and equivalence

ChrState simplify(const ChrState& state, FailRequest fail_request) {
  if (state.failed()) return ChrState::failed_state();
  std::vector<Term> evaluable;
  SolverContext ctx;
  ctx.fail_request = fail_request;
  for (const auto& b : state.builtins) {
    if (is_evaluable(b) || !b.is_ground())
      evaluable.push_back(b);
    else
      ctx.facts.push_back(b);
  }
  Environment start{{}, next_fresh_counter(state), {}};
  auto envs = solve_builtins(evaluable, start, ctx, false);
  if (envs.empty()) return ChrState::failed_state();

  std::optional<ChrState> result;
  for (const auto& env : envs) {
    ChrState s;
    for (const auto& g : state.goal) {
      Term r = resolve(g, env.bindings);
      if (!r.is_ground()) throw Undecided("non-ground goal constraint: " + to_string(r));
      s.goal.push_back(std::move(r));
    }
    s.builtins = ctx.facts;
    for (const auto& t : env.told) s.builtins.push_back(t);
    s.builtins = sorted_unique(std::move(s.builtins));
    if (result && (sorted_unique(result->goal) != sorted_unique(s.goal) || result->builtins != s.builtins))
      throw Undecided("builtin store has several distinct solutions");
    if (!result) result = std::move(s);
  }
  return *result;
}

namespace {

class FreshRenamer {
public:
  explicit FreshRenamer(const ChrState& s) : state_(s) {
    for (const auto& g : s.goal) collect(g);
  }

  std::map<std::string, std::string> run() {
    std::vector<const Term*> gammas;
    for (const auto& g : state_.goal)
      if (g.is("gamma", 3)) gammas.push_back(&g);
    std::stable_sort(gammas.begin(), gammas.end(), [](const Term* a, const Term* b) { return *a < *b; });
    for (const Term* g : gammas) visit(g->args()[1]);

    for (;;) {
      const std::string* best = nullptr;
      std::string best_sig;
      for (const auto& [id, chunk] : chunks_) {
        if (!fresh_counter(id) || names_.count(id)) continue;
        std::string sig = signature(*chunk);
        if (!best || sig < best_sig) {
          best = &id;
          best_sig = std::move(sig);
        }
      }
      if (!best) break;
      visit(Term::atom(*best));
    }
    for (const auto& g : state_.goal) name_all(g);
    for (const auto& b : state_.builtins) name_all(b);
    return names_;
  }

private:
  void collect(const Term& t) {
    if (t.is("chunk", 3) && t.args()[0].is_atom()) chunks_.emplace(t.args()[0].name(), &t);
    for (const auto& a : t.args()) collect(a);
  }

  void assign(const std::string& id) {
    if (fresh_counter(id) && !names_.count(id)) names_.emplace(id, std::string(kFreshPrefix) + std::to_string(names_.size()));
  }

  void visit(const Term& id) {
    if (!id.is_atom() || !fresh_counter(id.name()) || names_.count(id.name())) return;
    assign(id.name());
    auto it = chunks_.find(id.name());
    if (it == chunks_.end()) return;
    for (const auto& sv : it->second->args()[2].args())
      if (sv.arity() == 2) visit(sv.args()[1]);
  }

  void name_all(const Term& t) {
    if (t.is_atom()) assign(t.name());
    for (const auto& a : t.args()) name_all(a);
  }

  std::string label(const Term& t) const {
    if (t.is_atom() && fresh_counter(t.name())) {
      auto it = names_.find(t.name());
      return it == names_.end() ? "?" : it->second;
    }
    if (t.args().empty()) return to_string(t);
    std::string s = t.name() + "(";
    for (const auto& a : t.args()) s += label(a) + ",";
    return s + ")";
  }

  std::string signature(const Term& chunk) const { return label(chunk.args()[1]) + label(chunk.args()[2]); }

  const ChrState& state_;
  std::map<std::string, const Term*> chunks_;
  std::map<std::string, std::string> names_;
};

Term rename_atoms(const Term& t, const std::map<std::string, std::string>& names) {
  if (t.is_atom()) {
    auto it = names.find(t.name());
    return it == names.end() ? t : Term::atom(it->second);
  }
  if (t.args().empty()) return t;
  Term out = t;
  for (auto& a : out.args()) a = rename_atoms(a, names);
  if (is_chunk_list(out)) std::sort(out.args().begin(), out.args().end());
  return out;
}

}  // namespace

ChrState normalize(const ChrState& state) {
  ChrState s = simplify(state);
  if (s.failed()) return s;
  const auto names = FreshRenamer(s).run();
  ChrState out;
  for (const auto& g : s.goal) out.goal.push_back(rename_atoms(g, names));
  for (const auto& b : s.builtins) out.builtins.push_back(rename_atoms(b, names));
  std::sort(out.goal.begin(), out.goal.end());
  out.builtins = sorted_unique(std::move(out.builtins));
  return out;
}

std::string canonical_key(const ChrState& state) {
  ChrState n = normalize(state);
  if (n.failed()) return "FAILED";
  return to_string(n);
}

bool state_equiv(const ChrState& a, const ChrState& b) { return canonical_key(a) == canonical_key(b); }

// ---------------------------------------------------------------------------
// Rule application

namespace {

void match_heads(const std::vector<Term>& heads, std::size_t i, const std::vector<Term>& goal,
                 std::vector<std::size_t>& chosen, Bindings& b,
                 const std::function<void(const std::vector<std::size_t>&, const Bindings&)>& emit) {
  if (i == heads.size()) {
    emit(chosen, b);
    return;
  }
  for (std::size_t j = 0; j < goal.size(); ++j) {
    if (std::find(chosen.begin(), chosen.end(), j) != chosen.end()) continue;
    Bindings next = b;
    if (!unify(heads[i], goal[j], next)) continue;
    chosen.push_back(j);
    match_heads(heads, i + 1, goal, chosen, next, emit);
    chosen.pop_back();
  }
}

}  // namespace

std::vector<ChrTransition> chr_step(const ChrState& input, const std::vector<ChrRule>& program, FailRequest fail_request) {
  if (input.failed()) return {};
  const bool needs_simplify = std::any_of(input.builtins.begin(), input.builtins.end(),
                                          [](const Term& b) { return is_evaluable(b) || !b.is_ground(); });
  const ChrState state = needs_simplify ? simplify(input, fail_request) : input;
  if (state.failed()) return {};

  SolverContext ctx{state.builtins, fail_request};
  const std::uint64_t next_fresh = next_fresh_counter(state);
  std::vector<ChrTransition> out;
  std::size_t attempt = 0;

  for (const auto& rule : program) {
    const std::string suffix = "'" + std::to_string(attempt++);
    auto rename = [&](const std::vector<Term>& ts) {
      std::vector<Term> r;
      for (const auto& t : ts) r.push_back(rename_vars(t, suffix));
      return r;
    };
    std::vector<Term> heads = rename(rule.kept);
    const std::size_t n_kept = heads.size();
    for (auto& t : rename(rule.removed)) heads.push_back(std::move(t));
    const auto guard = rename(rule.guard);
    const auto body_user = rename(rule.body_user);
    const auto body_builtins = rename(rule.body_builtins);

    std::vector<std::size_t> chosen;
    Bindings b;
    match_heads(heads, 0, state.goal, chosen, b, [&](const std::vector<std::size_t>& sel, const Bindings& bind) {
      std::vector<bool> removed(state.goal.size(), false);
      for (std::size_t k = n_kept; k < sel.size(); ++k) removed[sel[k]] = true;
      Environment start{bind, next_fresh, {}};
      for (const auto& genv : solve_builtins(guard, start, ctx, true)) {
        auto bodies = solve_builtins(body_builtins, genv, ctx, false);
        if (bodies.empty()) {
          out.push_back({rule.name, ChrState::failed_state()});
          continue;
        }
        for (const auto& benv : bodies) {
          ChrState next;
          for (std::size_t j = 0; j < state.goal.size(); ++j)
            if (!removed[j]) next.goal.push_back(state.goal[j]);
          for (const auto& u : body_user) next.goal.push_back(resolve(u, benv.bindings));
          next.builtins = state.builtins;
          for (const auto& t : benv.told) push_unique(next.builtins, t);
          next.globals = state.globals;
          out.push_back({rule.name, std::move(next)});
        }
      }
    });
  }
  return out;
}

}  // namespace actr::chr
