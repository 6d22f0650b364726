// Acceptance suite. Each criterion prints one line:
//   criterion N: PASS|FAIL <summary> (<seconds>s, limit <seconds>s)
// Usage: acceptance [--criterion N] [--cli PATH]

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "actrchr/bisim.hpp"
#include "actrchr/parser.hpp"
#include "actrchr/translator.hpp"
#include "random_models.hpp"

using namespace actr;
using namespace actr::chr;

namespace {

struct Outcome {
  bool pass = false;
  std::string summary;
};

std::string cli_path;

Model fixture(const std::string& name) {
  std::ifstream in(std::string(ACTRCHR_FIXTURES) + "/" + name);
  std::stringstream s;
  s << in.rdbuf();
  return parse_model(s.str(), name);
}

Symbol S(const char* s) { return Symbol(s); }

// 1. Worked derivation sigma0 -no-> sigma1 -apply(inc)-> sigma2.
Outcome worked_example() {
  const Model m = fixture("counting.actr");
  const Semantics sem(m);
  const AbstractState s0 = initial_state(m);

  AbstractState s1 = s0;
  s1.buffer(S("retrieval"))->pending = false;
  AbstractState s2 = s1;
  s2.store.insert({S("c#0"), S("g"), {{S("current"), S("2")}}});
  s2.store.insert({S("c#1"), S("succ"), {{S("number"), S("2")}, {S("successor"), S("3")}}});
  s2.buffer(S("goal"))->chunk = S("c#0");
  s2.buffer(S("retrieval"))->chunk = S("c#1");
  s2.buffer(S("retrieval"))->pending = true;

  auto t0 = sem.successors(s0);
  if (t0.size() != 1 || t0[0].label.str() != "no" || t0[0].target != s1) return {false, "sigma0 step differs"};
  auto t1 = sem.successors(t0[0].target);
  if (t1.size() != 1 || t1[0].label.str() != "apply(inc)") return {false, "sigma1 step differs"};
  if (canonical(t1[0].target) != s2) return {false, "sigma2 differs:\n" + to_string(canonical(t1[0].target))};
  return {true, "sigma0 -no-> sigma1 -apply(inc)-> sigma2 (goal current=2, retrieval {number:2,successor:3} pending)"};
}

// Oracle for merge: plain map union with left priority and clash detection.
std::map<std::string, std::string> union_oracle(const std::vector<const ChunkStore*>& stores, bool& clash) {
  std::map<std::string, std::string> out;
  for (const auto* s : stores)
    for (const auto& [id, c] : *s) {
      std::string content = c.type.str();
      for (const auto& sv : c.val) content += "|" + sv.slot.str() + "=" + sv.value.str();
      auto [it, inserted] = out.emplace(id.str(), content);
      if (!inserted && it->second != content) clash = true;
    }
  return out;
}

std::map<std::string, std::string> as_map(const ChunkStore& s) {
  bool unused = false;
  return union_oracle({&s}, unused);
}

// 2. Merge monoid laws.
Outcome merge_monoid() {
  std::mt19937_64 rng(2024);
  std::size_t trials = 0, failures = 0;
  for (int i = 0; i < 1500; ++i) {
    auto pool = gen::random_chunk_pool(rng, 12);
    auto a = gen::random_store(rng, pool, 8);
    auto b = gen::random_store(rng, pool, 8);
    auto c = gen::random_store(rng, pool, 8);
    ++trials;
    bool clash = false;
    const auto ab = merge(a, b);
    const auto expected_ab = union_oracle({&a, &b}, clash);
    bool ok = !clash && as_map(ab.store) == expected_ab;
    ok = ok && merge(ab.store, c).store == merge(a, merge(b, c).store).store;
    ok = ok && merge(ChunkStore{}, a).store == a && merge(a, ChunkStore{}).store == a;
    ok = ok && merge(a, a).store == a;
    // Left embedding with preserved ids.
    for (const auto& [id, chunk] : a) ok = ok && ab.store.find(id) && *ab.store.find(id) == chunk && ab.map.at(id) == id;
    for (const auto& [id, chunk] : b) ok = ok && ab.map.at(id) == id;
    if (!ok) ++failures;
  }
  return {failures == 0, std::to_string(trials) + " store triples, " + std::to_string(failures) + " failures"};
}

std::set<std::string> successor_keys(const Rule& rule, const AbstractState& state, const Semantics& sem) {
  std::set<std::string> out;
  auto theta = match_rule(rule, state);
  if (!theta) return out;
  for (const auto& e : sem.interpret_rule(rule, *theta, state)) out.insert(to_string(canonical(apply_transition(state, e))));
  return out;
}

// Every store over ids k0..k(n-1) (n <= 3) of two small types and the buffer
// assignments into it.
std::vector<AbstractState> exhaustive_states(const Model& m) {
  const TypeTable types = m.type_table();
  std::vector<AbstractState> out;
  const std::vector<Symbol> ids{S("k0"), S("k1"), S("k2")};
  for (std::size_t n = 1; n <= 3; ++n) {
    std::vector<Symbol> values{nil_symbol()};
    for (std::size_t i = 0; i < n; ++i) values.push_back(ids[i]);
    // Each chunk: type t (slot a) or u (slots a, b) with any values.
    std::vector<std::vector<SlotValue>> t_vals, u_vals;
    for (const auto& x : values) t_vals.push_back({{S("a"), x}});
    for (const auto& x : values)
      for (const auto& y : values) u_vals.push_back({{S("a"), x}, {S("b"), y}});
    const std::size_t per_chunk = t_vals.size() + u_vals.size();
    std::size_t total = 1;
    for (std::size_t i = 0; i < n; ++i) total *= per_chunk;
    for (std::size_t code = 0; code < total; ++code) {
      ChunkStore store = ChunkStore::with_nil();
      std::size_t rest = code;
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t k = rest % per_chunk;
        rest /= per_chunk;
        if (k < t_vals.size())
          store.insert({ids[i], S("t"), t_vals[k]});
        else
          store.insert({ids[i], S("u"), u_vals[k - t_vals.size()]});
      }
      for (std::size_t holder = 0; holder < n; ++holder) {
        AbstractState s{store, {{S("goal"), BufferContent{ids[holder], false}}}, {}};
        out.push_back(std::move(s));
      }
    }
  }
  return out;
}

// 3. Set normal form preserves applicability and successors; dropped rules
// never match.
Outcome normal_form_theorem() {
  std::mt19937_64 rng(77);
  std::size_t pairs = 0, applicable = 0, failures = 0;
  while (pairs < 600) {
    auto m = gen::random_model(rng);
    const Semantics sem(m);
    const TypeTable types = m.type_table();
    auto rule = gen::random_raw_rule(rng, m, false);
    auto normal = set_normal_form(rule, types);
    for (int k = 0; k < 3; ++k) {
      auto state = gen::random_state(rng, m);
      ++pairs;
      const bool raw_match = match_rule(rule, state).has_value();
      const bool norm_match = normal && match_rule(*normal, state).has_value();
      if (raw_match != norm_match) {
        ++failures;
        continue;
      }
      if (!raw_match) continue;
      ++applicable;
      if (successor_keys(rule, state, sem) != successor_keys(*normal, state, sem)) ++failures;
    }
  }

  // Dropped rules over a fixed small signature, checked against every store
  // with at most three chunks.
  const Model small = parse_model(
      "type t { a }\ntype u { a, b }\nchunk k0 : t { a: nil }\nchunk k1 : u { a: nil, b: nil }\nbuffer goal = k0\n");
  const auto states = exhaustive_states(small);
  std::size_t dropped = 0, dropped_matches = 0;
  const std::vector<std::string> clashing{
      "rule d { goal: t { a: k0, a: k1 } ==> }",
      "rule d { goal: u { a: X, b: X, a: k0, b: nil } ==> }",
      "rule d { goal: u { a: X, a: Y, b: Y, b: k1, a: k2 } ==> }",
      "rule d { goal: t { a: nil, a: k2 } ==> }",
  };
  for (const auto& text : clashing) {
    Model with_rule = parse_model("type t { a }\ntype u { a, b }\n" + text);
    const Rule& r = with_rule.rules[0];
    if (set_normal_form(r, small.type_table())) continue;
    ++dropped;
    for (const auto& s : states)
      if (match_rule(r, s)) ++dropped_matches;
  }
  for (int i = 0; i < 100; ++i) {
    Model with_rule = small;
    with_rule.chunks.push_back({S("k2"), S("u"), {{S("a"), nil_symbol()}, {S("b"), nil_symbol()}}, {}});
    auto r = gen::random_raw_rule(rng, with_rule, true);
    if (set_normal_form(r, small.type_table())) {
      ++failures;  // a forced clash must drop
      continue;
    }
    ++dropped;
    for (const auto& s : states)
      if (match_rule(r, s)) ++dropped_matches;
  }
  const bool ok = failures == 0 && dropped_matches == 0 && applicable >= 50;
  return {ok, std::to_string(pairs) + " (rule, state) pairs, " + std::to_string(applicable) + " applicable, " +
                  std::to_string(failures) + " mismatches; " + std::to_string(dropped) + " dropped rules matched " +
                  std::to_string(dropped_matches) + " of " + std::to_string(states.size()) + " exhaustive states"};
}

struct BisimRun {
  std::size_t models = 0, passed = 0, effect_checks = 0, effect_failures = 0, nodes = 0;
  bool counting_pass = false;
  bool mutation_backward = false;
  std::string first_failure;
  std::string first_effect_failure;
};

BisimRun run_bisimulation() {
  BisimRun run;
  const Model counting = fixture("counting.actr");
  auto base = bisim_check(counting, initial_state(counting), 3);
  run.counting_pass = base.pass();
  run.effect_checks += base.effect_checks;
  run.effect_failures += base.effect_failures.size();

  std::mt19937_64 rng(5150);
  for (int i = 0; i < 250; ++i) {
    const Model m = gen::random_model(rng);
    auto r = bisim_check(m, initial_state(m), 3);
    ++run.models;
    run.nodes += r.nodes;
    run.effect_checks += r.effect_checks;
    run.effect_failures += r.effect_failures.size();
    if (!r.effect_failures.empty() && run.first_effect_failure.empty())
      run.first_effect_failure = print_model(m) + r.effect_failures.front();
    if (r.counterexamples.empty())
      ++run.passed;
    else if (run.first_failure.empty())
      run.first_failure = print_model(m) + r.text();
  }

  const Model imaginal = fixture("counting_imaginal.actr");
  BisimOptions mutate;
  mutate.translation.drop_gamma_passthrough = true;
  auto bad = bisim_check(imaginal, initial_state(imaginal), 3, mutate);
  for (const auto& c : bad.counterexamples) run.mutation_backward |= c.direction == Direction::Backward;
  run.mutation_backward = run.mutation_backward && !bad.pass() && bisim_check(imaginal, initial_state(imaginal), 3).pass();
  return run;
}

// 4. Effect lemma on every matching (rule, state) pair of criterion 5's runs.
Outcome effect_lemma() {
  const auto run = run_bisimulation();
  const bool ok = run.effect_checks > 0 && run.effect_failures == 0;
  std::string summary = std::to_string(run.effect_checks) + " matching (rule, state) pairs, " +
                        std::to_string(run.effect_failures) + " effect-set mismatches";
  if (!run.first_effect_failure.empty()) summary += "\n" + run.first_effect_failure;
  return {ok, summary};
}

// 5. Bisimulation on the counting model and random models, plus fault injection.
Outcome bisimulation() {
  const auto run = run_bisimulation();
  const bool ok = run.counting_pass && run.passed == run.models && run.models >= 200 && run.mutation_backward;
  std::string summary = std::string("counting ") + (run.counting_pass ? "pass" : "FAIL") + ", " +
                        std::to_string(run.passed) + "/" + std::to_string(run.models) + " random models pass (" +
                        std::to_string(run.nodes) + " states), mutated translator " +
                        (run.mutation_backward ? "fails with a backward counterexample" : "NOT caught");
  if (!run.first_failure.empty()) summary += "\n" + run.first_failure;
  return {ok, summary};
}

// 6. Translation shape.
Outcome translation_shape() {
  std::mt19937_64 rng(606);
  std::size_t states = 0, programs = 0, bad = 0;
  const std::string no = "no @ gamma(B,C,D) <=> D > 0 | gamma(B,C,0)";
  std::vector<Model> models{fixture("counting.actr"), fixture("counting_imaginal.actr")};
  for (int i = 0; i < 300; ++i) models.push_back(gen::random_model(rng));
  for (const auto& m : models) {
    const Semantics sem(m);
    auto program = chr_of_model(m);
    ++programs;
    if (program.size() != sem.rules().size() + 1 || to_string(program.back()) != no) ++bad;
    auto g = sem.explore(initial_state(m), 3, DedupMode::Exact);
    for (const auto& n : g.nodes) {
      auto s = chr_of_state(n.state);
      ++states;
      std::size_t deltas = 0, gammas = 0;
      for (const auto& c : s.goal) {
        deltas += c.is("delta", 1);
        gammas += c.is("gamma", 3);
      }
      if (deltas != 1 || gammas != m.buffers.size() || s.goal.size() != 1 + m.buffers.size()) ++bad;
    }
  }
  return {bad == 0, std::to_string(states) + " translated states, " + std::to_string(programs) + " programs, " +
                        std::to_string(bad) + " shape violations"};
}

std::string run_capture(const std::string& cmd) {
  std::string out;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return "<popen failed>";
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) out.append(buf.data(), n);
  const int status = pclose(p);
  return out + "\n<exit " + std::to_string(status) + ">";
}

// 7. Determinism of translate and seeded run.
Outcome determinism() {
  if (cli_path.empty()) return {false, "no --cli path given"};
  std::vector<std::string> inputs{std::string(ACTRCHR_FIXTURES) + "/counting.actr",
                                  std::string(ACTRCHR_FIXTURES) + "/counting_imaginal.actr"};
  // A random model with branching, written to the working directory.
  std::mt19937_64 rng(7);
  for (int i = 0; i < 3; ++i) {
    const std::string path = "determinism_" + std::to_string(i) + ".actr";
    std::ofstream(path) << print_model(gen::random_model(rng));
    inputs.push_back(path);
  }
  std::size_t compared = 0, differing = 0;
  for (const auto& in : inputs) {
    for (const std::string& cmd : {cli_path + " translate " + in + " --out -",
                                   cli_path + " run " + in + " --seed 42 --depth 12",
                                   cli_path + " run " + in + " --seed 18446744073709551615 --depth 12",
                                   cli_path + " explore " + in + " --depth 4 --format trace"}) {
      ++compared;
      const auto a = run_capture(cmd);
      const auto b = run_capture(cmd);
      if (a != b || a.find("<exit 0>") == std::string::npos) ++differing;
    }
  }
  return {differing == 0, std::to_string(compared) + " command pairs, " + std::to_string(differing) + " differing"};
}

struct Criterion {
  int id;
  double limit_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--criterion" && i + 1 < argc) only = std::atoi(argv[++i]);
    else if (a == "--cli" && i + 1 < argc) cli_path = argv[++i];
  }
  const std::vector<Criterion> criteria{
      {1, 1.0, worked_example},    {2, 10.0, merge_monoid},       {3, 30.0, normal_form_theorem},
      {4, 120.0, effect_lemma},    {5, 120.0, bisimulation},      {6, 60.0, translation_shape},
      {7, 60.0, determinism},
  };
  bool all = true;
  for (const auto& c : criteria) {
    if (only && c.id != only) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool pass = o.pass && secs < c.limit_seconds;
    all = all && pass;
    char timing[64];
    std::snprintf(timing, sizeof timing, " (%.2fs, limit %.0fs)", secs, c.limit_seconds);
    std::cout << "criterion " << c.id << ": " << (pass ? "PASS " : "FAIL ") << o.summary << timing << std::endl;
  }
  return all ? 0 : 1;
}
