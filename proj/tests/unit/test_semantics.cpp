#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "actrchr/parser.hpp"
#include "actrchr/semantics.hpp"
#include "random_models.hpp"

using namespace actr;

namespace {

Symbol S(const char* s) { return Symbol(s); }

Model counting() {
  std::ifstream in(std::string(ACTRCHR_FIXTURES) + "/counting.actr");
  std::stringstream s;
  s << in.rdbuf();
  return parse_model(s.str(), "counting.actr");
}

AbstractState sigma1(const Model& m) {
  auto s = initial_state(m);
  s.buffer(S("retrieval"))->pending = false;
  return s;
}

Rule rule_from(const std::string& text_after_base) { return parse_model(text_after_base).rules.at(0); }

// Brute-force matcher: tries every assignment of store ids to the rule's
// variables and keeps those satisfying the matching predicate literally.
std::vector<Substitution> all_matches(const Rule& rule, const AbstractState& state) {
  const auto vars_set = lhs_variables(rule);
  const std::vector<Variable> vars(vars_set.begin(), vars_set.end());
  std::vector<Symbol> ids;
  for (const auto& [id, c] : state.store) ids.push_back(id);
  std::vector<Substitution> out;
  std::vector<std::size_t> idx(vars.size(), 0);
  for (;;) {
    Substitution theta;
    for (std::size_t i = 0; i < vars.size(); ++i) theta.insert_or_assign(vars[i], ids[idx[i]]);
    bool ok = true;
    for (const auto& t : rule.lhs) {
      const auto* content = state.buffer(t.buffer);
      if (!content || content->pending) { ok = false; break; }
      const Chunk& c = state.store.id_inverse(content->chunk);
      if (c.type != t.type) { ok = false; break; }
      for (const auto& p : t.pairs) {
        Symbol want = std::holds_alternative<Symbol>(p.value) ? std::get<Symbol>(p.value) : theta.at(std::get<Variable>(p.value));
        auto v = c.value_of(p.slot);
        if (!v || state.store.id_inverse(*v).id != want) { ok = false; break; }
      }
    }
    if (ok) out.push_back(theta);
    std::size_t k = 0;
    while (k < idx.size() && ++idx[k] == ids.size()) idx[k++] = 0;
    if (k == idx.size()) break;
  }
  return out;
}

const char* kTypes = R"(
type number {}
type succ { number, successor }
type g { current }
)";

}  // namespace

TEST(SetNormalForm, IncIsAFixpoint) {
  auto m = counting();
  const auto types = m.type_table();
  EXPECT_TRUE(is_set_normal_form(m.rules[0], types));
  auto n = set_normal_form(m.rules[0], types);
  ASSERT_TRUE(n);
  EXPECT_EQ(*n, m.rules[0]);
}

TEST(SetNormalForm, MissingSlotGainsFreshVariable) {
  auto m = counting();
  auto r = rule_from(std::string(kTypes) + "rule r {\n retrieval: succ { number: X }\n ==>\n}\n");
  auto n = set_normal_form(r, m.type_table());
  ASSERT_TRUE(n);
  ASSERT_EQ(n->lhs[0].pairs.size(), 2u);
  EXPECT_EQ(n->lhs[0].pairs[1].slot, S("successor"));
  EXPECT_EQ(n->lhs[0].pairs[1].value, Value(Variable("V#0")));
  EXPECT_TRUE(is_set_normal_form(*n, m.type_table()));
}

TEST(SetNormalForm, TwoConstantsDrop) {
  auto m = counting();
  auto r = rule_from(std::string(kTypes) + "rule r {\n retrieval: succ { number: 1, number: 2 }\n ==>\n}\n");
  EXPECT_FALSE(set_normal_form(r, m.type_table()).has_value());
}

TEST(SetNormalForm, DuplicateVariablesCollapseAndConstantsWin) {
  auto m = counting();
  auto r = rule_from(std::string(kTypes) +
                     "rule r {\n retrieval: succ { number: X, number: Y, successor: Y }\n goal: g { current: X, current: 1 }\n ==>\n"
                     " modify goal { current: Y }\n}\n");
  auto n = set_normal_form(r, m.type_table());
  ASSERT_TRUE(n);
  EXPECT_TRUE(is_set_normal_form(*n, m.type_table()));
  // X = Y and X = 1, so everything becomes the constant 1.
  EXPECT_EQ(n->lhs[0].pairs[0].value, Value(S("1")));
  EXPECT_EQ(n->lhs[0].pairs[1].value, Value(S("1")));
  EXPECT_EQ(n->rhs[0].pairs[0].value, Value(S("1")));
}

TEST(Matching, IncOnSigma1AgreesWithBruteForce) {
  auto m = counting();
  auto s1 = sigma1(m);
  auto theta = match_rule(m.rules[0], s1);
  ASSERT_TRUE(theta);
  EXPECT_EQ(*theta, (Substitution{{Variable("X"), S("1")}, {Variable("Y"), S("2")}}));
  auto brute = all_matches(m.rules[0], s1);
  ASSERT_EQ(brute.size(), 1u);
  EXPECT_EQ(brute[0], *theta);
}

TEST(Matching, PendingBufferAndTypeMismatchDoNotMatch) {
  auto m = counting();
  EXPECT_FALSE(match_rule(m.rules[0], initial_state(m)));
  auto r = rule_from(std::string(kTypes) + "rule r {\n retrieval: g { current: X }\n ==>\n}\n");
  EXPECT_FALSE(match_rule(r, sigma1(m)));
}

TEST(Matching, AgreesWithBruteForceOnRandomModels) {
  std::mt19937_64 rng(21);
  int matched = 0;
  for (int i = 0; i < 300; ++i) {
    auto m = gen::random_model(rng);
    auto s = gen::random_state(rng, m);
    const Semantics sem(m);
    for (const auto& r : sem.rules()) {
      auto theta = match_rule(r, s);
      auto brute = all_matches(r, s);
      ASSERT_LE(brute.size(), 1u);
      EXPECT_EQ(theta.has_value(), brute.size() == 1);
      if (theta) {
        EXPECT_EQ(*theta, brute[0]);
        ++matched;
      }
    }
  }
  EXPECT_GT(matched, 20);
}

TEST(Selection, CountingStates) {
  auto m = counting();
  const Semantics sem(m);
  EXPECT_TRUE(sem.select(initial_state(m)).empty());
  auto sel = sem.select(sigma1(m));
  ASSERT_EQ(sel.size(), 1u);
  EXPECT_EQ(sel[0].rule, 0u);
  EXPECT_TRUE(select(sigma1(m), {}).empty());
}

TEST(Interpretation, ModificationOverridesAndMapsUnknownToNil) {
  auto m = counting();
  auto s1 = sigma1(m);
  FreshIds ids = FreshIds::after(s1.store);
  Action a{ActionKind::Modify, S("goal"), std::nullopt, {{S("current"), S("2"), {}}}, {}};
  auto e = interpret_modification(a, s1, ids);
  ASSERT_EQ(e.size(), 1u);
  ASSERT_EQ(e[0].gamma.size(), 1u);
  const Chunk* c = e[0].delta.find(e[0].gamma[0].second.chunk);
  ASSERT_TRUE(c);
  EXPECT_EQ(c->type, S("g"));
  EXPECT_EQ(c->value_of(S("current")), S("2"));
  EXPECT_FALSE(e[0].gamma[0].second.pending);
  EXPECT_TRUE(e[0].upsilon.empty());

  Action unknown{ActionKind::Modify, S("goal"), std::nullopt, {{S("current"), S("zzz"), {}}}, {}};
  auto u = interpret_modification(unknown, s1, ids);
  EXPECT_EQ(u[0].delta.begin()->second.value_of(S("current")), nil_symbol());

  Action copy{ActionKind::Modify, S("goal"), std::nullopt, {}, {}};
  auto k = interpret_modification(copy, s1, ids);
  EXPECT_EQ(k[0].delta.begin()->second.val, s1.store.find(S("goal0"))->val);
}

TEST(Interpretation, RequestAnswersFromDeclarativeMemory) {
  auto m = counting();
  auto s1 = sigma1(m);
  auto config = ArchitectureConfig::abstract_semantics(m.buffer_names());
  FreshIds ids = FreshIds::after(s1.store);

  Action two{ActionKind::Request, S("retrieval"), S("succ"), {{S("number"), S("2"), {}}}, {}};
  auto e = interpret_request(two, s1, config, ids);
  ASSERT_EQ(e.size(), 1u);
  const Chunk& c = e[0].delta.begin()->second;
  EXPECT_EQ(c.type, S("succ"));
  EXPECT_EQ(c.value_of(S("number")), S("2"));
  EXPECT_EQ(c.value_of(S("successor")), S("3"));
  EXPECT_TRUE(e[0].gamma[0].second.pending);

  Action all{ActionKind::Request, S("retrieval"), S("succ"), {}, {}};
  EXPECT_EQ(interpret_request(all, s1, config, ids).size(), 2u);

  Action none{ActionKind::Request, S("retrieval"), S("succ"), {{S("number"), S("9"), {}}}, {}};
  auto f = interpret_request(none, s1, config, ids);
  ASSERT_EQ(f.size(), 1u);
  EXPECT_EQ(f[0].delta.begin()->second.type, chunk_type_symbol());
  EXPECT_TRUE(f[0].delta.begin()->second.val.empty());
  EXPECT_TRUE(f[0].gamma[0].second.pending);

  auto stuck = ArchitectureConfig::abstract_semantics(m.buffer_names(), FailRequest::Stuck);
  EXPECT_TRUE(interpret_request(none, s1, stuck, ids).empty());

  ArchitectureConfig empty;
  EXPECT_THROW(interpret_request(two, s1, empty, ids), NoHandler);
}

TEST(Interpretation, RequestAnswersMatchDeclarativeBruteForce) {
  auto content = [](const Chunk& c) {
    std::string v = c.type.str() + ":";
    for (const auto& x : c.val) v += x.slot.str() + "=" + x.value.str() + ";";
    return v;
  };
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    auto m = gen::random_model(rng);
    auto s = gen::random_state(rng, m);
    auto config = ArchitectureConfig::abstract_semantics(m.buffer_names());
    const TypeTable table = m.type_table();
    for (const auto& [type, slots] : table.types()) {
      std::vector<SlotValue> spec;
      for (const auto& slot : slots)
        if (rng() % 2) spec.push_back({slot, m.chunks[rng() % m.chunks.size()].id});
      Action a{ActionKind::Request, m.buffers[0].name, type, {}, {}};
      for (const auto& sv : spec) a.pairs.push_back({sv.slot, sv.value, {}});
      std::multiset<std::string> expected;
      for (const auto& id : m.declarative) {
        const Chunk& c = s.store.id_inverse(id);
        if (c.type != type) continue;
        bool ok = true;
        for (const auto& sv : spec) ok = ok && s.store.id_inverse(*c.value_of(sv.slot)).id == sv.value;
        if (ok) expected.insert(content(c));
      }
      FreshIds ids = FreshIds::after(s.store);
      auto effects = interpret_request(a, s, config, ids);
      if (expected.empty()) {
        ASSERT_EQ(effects.size(), 1u);
        EXPECT_EQ(effects[0].delta.begin()->second.type, chunk_type_symbol());
        continue;
      }
      std::multiset<std::string> got;
      for (const auto& e : effects) got.insert(content(e.delta.begin()->second));
      EXPECT_EQ(got, expected);
    }
  }
}

TEST(Interpretation, CombineEffects) {
  Effect e = neutral_effect();
  e.delta.insert({S("c#0"), S("p"), {}});
  e.gamma.emplace_back(S("goal"), BufferContent{S("c#0"), false});
  EXPECT_EQ(combine_effects(e, neutral_effect()), e);
  EXPECT_EQ(combine_effects(neutral_effect(), e), e);
  EXPECT_THROW(combine_effects(e, e), DomainOverlap);

  Effect f1 = neutral_effect(), f2 = neutral_effect();
  f1.gamma.emplace_back(S("retrieval"), BufferContent{S("c#1"), true});
  f1.delta.insert({S("c#1"), S("p"), {}});
  f2.gamma.emplace_back(S("retrieval"), BufferContent{S("c#2"), true});
  f2.delta.insert({S("c#2"), S("p"), {}});
  auto both = combine_effects(std::vector<Effect>{e}, std::vector<Effect>{f1, f2});
  ASSERT_EQ(both.size(), 2u);
  EXPECT_EQ(both[0].gamma.size(), 2u);
  EXPECT_EQ(both[1].delta.size(), 2u);
}

TEST(Interpretation, IncEffectCombinesModificationAndRequest) {
  auto m = counting();
  auto s1 = sigma1(m);
  const Semantics sem(m);
  const auto theta = *match_rule(m.rules[0], s1);
  auto effects = sem.interpret_rule(m.rules[0], theta, s1);
  ASSERT_EQ(effects.size(), 1u);

  FreshIds ids = FreshIds::after(s1.store);
  auto config = ArchitectureConfig::abstract_semantics(m.buffer_names());
  auto mod = interpret_modification(instantiate(m.rules[0].rhs[0], theta), s1, ids);
  auto req = interpret_request(instantiate(m.rules[0].rhs[1], theta), s1, config, ids);
  EXPECT_EQ(combine_effects(mod, req), effects);
}

TEST(Transitions, WorkedDerivation) {
  auto m = counting();
  const Semantics sem(m);
  auto s0 = initial_state(m);

  auto t0 = sem.successors(s0);
  ASSERT_EQ(t0.size(), 1u);
  EXPECT_EQ(t0[0].label.str(), "no");
  EXPECT_EQ(t0[0].target, sigma1(m));

  auto t1 = sem.successors(t0[0].target);
  ASSERT_EQ(t1.size(), 1u);
  EXPECT_EQ(t1[0].label.str(), "apply(inc)");

  // Expected sigma2, written out by hand.
  AbstractState s2 = sigma1(m);
  s2.store.insert({S("c#0"), S("g"), {{S("current"), S("2")}}});
  s2.store.insert({S("c#1"), S("succ"), {{S("number"), S("2")}, {S("successor"), S("3")}}});
  s2.buffer(S("goal"))->chunk = S("c#0");
  s2.buffer(S("retrieval"))->chunk = S("c#1");
  s2.buffer(S("retrieval"))->pending = true;
  EXPECT_EQ(canonical(t1[0].target), s2);
}

TEST(Transitions, NoRuleOnePerPendingBuffer) {
  auto m = counting();
  auto s = initial_state(m);
  EXPECT_EQ(no_rule_transitions(s).size(), 1u);
  s.buffer(S("goal"))->pending = true;
  EXPECT_EQ(no_rule_transitions(s).size(), 2u);
  EXPECT_TRUE(no_rule_transitions(sigma1(m)).empty());
}

TEST(Transitions, UntouchedBufferKeepsItsChunk) {
  auto m = counting();
  auto s1 = sigma1(m);
  Effect e = neutral_effect();
  e.delta.insert({S("c#0"), S("g"), {{S("current"), S("3")}}});
  e.gamma.emplace_back(S("goal"), BufferContent{S("c#0"), false});
  auto s = apply_transition(s1, e);
  EXPECT_EQ(s.buffer(S("retrieval"))->chunk, S("b"));
  EXPECT_EQ(s.buffer(S("goal"))->chunk, S("c#0"));
  EXPECT_EQ(s.upsilon, s1.upsilon);
}

TEST(Transitions, FinalStateHasNoSuccessors) {
  auto m = counting();
  const Semantics sem(m);
  auto s = sigma1(m);
  s.buffer(S("retrieval"))->chunk = S("c");
  s.buffer(S("goal"))->chunk = S("b");
  EXPECT_TRUE(sem.successors(s).empty());
}

TEST(Transitions, NeutralRuleChangesOnlyFreshIds) {
  auto m = parse_model(std::string(kTypes) + R"(
chunk 1 : number {}
chunk goal0 : g { current: 1 }
buffer goal = goal0
rule touch {
  goal: g { current: X }
  ==>
  modify goal { }
}
)");
  const Semantics sem(m);
  auto s = initial_state(m);
  auto t = sem.successors(s);
  ASSERT_EQ(t.size(), 1u);
  const auto& s2 = t[0].target;
  const Chunk* c = s2.store.find(s2.buffer(S("goal"))->chunk);
  EXPECT_EQ(c->val, s.store.find(S("goal0"))->val);
  EXPECT_EQ(c->type, S("g"));
}

TEST(Explore, CountingGraph) {
  auto m = counting();
  const Semantics sem(m);
  auto g0 = sem.explore(initial_state(m), 0, DedupMode::Canonical);
  EXPECT_EQ(g0.nodes.size(), 1u);
  EXPECT_TRUE(g0.truncated);

  auto g = sem.explore(initial_state(m), 2, DedupMode::Canonical);
  ASSERT_EQ(g.nodes.size(), 3u);
  ASSERT_EQ(g.edges.size(), 2u);
  EXPECT_EQ(g.edges[0].label.str(), "no");
  EXPECT_EQ(g.edges[1].label.str(), "apply(inc)");
  EXPECT_EQ(g.nodes[2].depth, 2u);

  auto deep = sem.explore(initial_state(m), 16, DedupMode::Canonical);
  EXPECT_FALSE(deep.truncated);
  // no, inc (2), no, inc (3): then retrieval of successor of 3 fails.
  EXPECT_GE(deep.nodes.size(), 5u);
}

TEST(Explore, TwoAnswerRequestBranches) {
  auto m = parse_model(std::string(kTypes) + R"(
chunk 1 : number {}
chunk 2 : number {}
chunk b : succ { number: 1, successor: 2 }
chunk c : succ { number: 2, successor: 1 }
chunk goal0 : g { current: 1 }
dm { b, c }
buffer goal = goal0
buffer retrieval = b
rule any {
  goal: g { current: 1 }
  ==>
  modify goal { current: 2 }
  request retrieval succ { }
}
)");
  const Semantics sem(m);
  auto g = sem.explore(initial_state(m), 1, DedupMode::Canonical);
  EXPECT_EQ(g.edges.size(), 2u);
  EXPECT_EQ(g.nodes.size(), 3u);
}

TEST(Explore, ExactVersusCanonicalDedup) {
  auto m = parse_model(std::string(kTypes) + R"(
chunk 1 : number {}
chunk goal0 : g { current: 1 }
buffer goal = goal0
buffer other = goal0
rule a {
  goal: g { current: 1 }
  ==>
  modify goal { }
}
rule b {
  other: g { current: 1 }
  ==>
  modify other { }
}
)");
  const Semantics sem(m);
  auto exact = sem.explore(initial_state(m), 2, DedupMode::Exact);
  auto canon = sem.explore(initial_state(m), 2, DedupMode::Canonical);
  EXPECT_LE(canon.nodes.size(), exact.nodes.size());
}

TEST(Canonical, RenamingIsInvariantUnderFreshIdPermutation) {
  auto m = counting();
  const Semantics sem(m);
  auto s1 = sigma1(m);
  auto s2 = sem.successors(s1)[0].target;
  // Swap c#0 and c#1 by hand.
  AbstractState swapped = s1;
  const Chunk* g = s2.store.find(S("c#0"));
  const Chunk* r = s2.store.find(S("c#1"));
  swapped.store.insert({S("c#1"), g->type, g->val});
  swapped.store.insert({S("c#0"), r->type, r->val});
  swapped.buffer(S("goal"))->chunk = S("c#1");
  swapped.buffer(S("retrieval"))->chunk = S("c#0");
  swapped.buffer(S("retrieval"))->pending = true;
  EXPECT_NE(swapped, s2);
  EXPECT_EQ(canonical(swapped), canonical(s2));
  EXPECT_EQ(state_hash(swapped), state_hash(s2));
  EXPECT_EQ(state_hash(s2).size(), 16u);
}

TEST(Output, TraceAndDot) {
  auto m = counting();
  const Semantics sem(m);
  auto g = sem.explore(initial_state(m), 2, DedupMode::Canonical);
  auto trace = to_trace(g);
  EXPECT_NE(trace.find("step 1: no -> " + g.nodes[1].hash), std::string::npos);
  EXPECT_NE(trace.find("step 2: apply(inc) -> " + g.nodes[2].hash), std::string::npos);
  auto dot = to_dot(g);
  EXPECT_EQ(dot.rfind("digraph", 0), 0u);
}

TEST(Properties, SuccessorsAreGroundAndDelaysMoveCorrectly) {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 150; ++i) {
    auto m = gen::random_model(rng);
    const Semantics sem(m);
    auto g = sem.explore(initial_state(m), 3, DedupMode::Exact);
    for (const auto& e : g.edges) {
      const auto& from = g.nodes[e.from].state;
      const auto& to = g.nodes[e.to].state;
      for (const auto& [b, content] : to.gamma) {
        ASSERT_TRUE(to.store.contains(content.chunk)) << b;
        const auto* before = from.buffer(b);
        if (e.label.kind == Label::Kind::No && before->pending && !content.pending) continue;
        if (before->pending == content.pending) continue;
        // 0 -> 1 only through a request of this rule.
        EXPECT_EQ(e.label.kind, Label::Kind::Apply);
        EXPECT_TRUE(content.pending);
      }
      for (const auto& [id, c] : to.store)
        for (const auto& sv : c.val) EXPECT_TRUE(to.store.contains(sv.value)) << id;
    }
  }
}
