#include "actrchr/bisim.hpp"

#include <algorithm>
#include <functional>
#include "json.hpp"

namespace actr::chr {

const char* to_string(Direction d) { return d == Direction::Forward ? "forward" : "backward"; }

namespace {

struct Side {
  std::string label;
  std::string key;
};

// Kuhn's augmenting paths; returns for each left index its partner or npos.
std::vector<std::size_t> max_matching(std::size_t left, std::size_t right,
                                      const std::function<bool(std::size_t, std::size_t)>& edge) {
  constexpr std::size_t none = static_cast<std::size_t>(-1);
  std::vector<std::size_t> match_right(right, none), match_left(left, none);
  std::function<bool(std::size_t, std::vector<bool>&)> augment = [&](std::size_t u, std::vector<bool>& seen) {
    for (std::size_t v = 0; v < right; ++v) {
      if (!edge(u, v) || seen[v]) continue;
      seen[v] = true;
      if (match_right[v] == none || augment(match_right[v], seen)) {
        match_right[v] = u;
        match_left[u] = v;
        return true;
      }
    }
    return false;
  };
  for (std::size_t u = 0; u < left; ++u) {
    std::vector<bool> seen(right, false);
    augment(u, seen);
  }
  return match_left;
}

std::vector<Side> dedup(std::vector<Side> v) {
  std::vector<Side> out;
  for (auto& s : v)
    if (std::none_of(out.begin(), out.end(), [&](const Side& o) { return o.key == s.key; })) out.push_back(std::move(s));
  return out;
}

std::size_t common_prefix(const std::string& a, const std::string& b) {
  std::size_t n = 0;
  while (n < a.size() && n < b.size() && a[n] == b[n]) ++n;
  return n;
}

std::string nearest(const std::string& key, const std::vector<Side>& candidates) {
  const Side* best = nullptr;
  for (const auto& c : candidates)
    if (!best || common_prefix(key, c.key) > common_prefix(key, best->key)) best = &c;
  return best ? best->key : "";
}

std::vector<Term> effect_goal(const Term& delta, std::vector<std::pair<std::string, Term>> gamma) {
  std::sort(gamma.begin(), gamma.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<Term> goal{Term::compound("res", {delta})};
  for (auto& [b, t] : gamma) goal.push_back(std::move(t));
  return goal;
}

}  // namespace

EffectLemmaResult effect_lemma_check(const Semantics& sem, const Rule& rule, const AbstractState& state) {
  EffectLemmaResult result;
  auto theta = match_rule(rule, state);
  if (!theta) {
    result.detail = "rule does not match";
    return result;
  }

  std::vector<std::string> actr_keys;
  for (const auto& e : sem.interpret_rule(rule, *theta, state)) {
    std::vector<std::pair<std::string, Term>> gamma;
    for (const auto& [b, c] : e.gamma)
      gamma.emplace_back(b.str(), Term::compound("gamma", {Term::atom(b.str()), Term::atom(c.chunk.str()),
                                               Term::integer(c.pending ? 1 : 0)}));
    ChrState s;
    s.goal = effect_goal(encode_store(e.delta), std::move(gamma));
    for (const auto& a : e.upsilon) {
      std::vector<Term> args;
      for (const auto& x : a.args) args.push_back(Term::atom(x.str()));
      s.builtins.push_back(args.empty() ? Term::atom(a.predicate.str()) : Term::compound(a.predicate.str(), args));
    }
    actr_keys.push_back(canonical_key(s));
  }
  result.effects = actr_keys.size();

  const ChrRule translated = chr_of_rule(rule, sem.buffers(), sem.types());
  const VarPlan plan = plan_variables(rule, sem.buffers());
  const ChrState chr_state = chr_of_state(state);
  Environment env;
  env.next_fresh = next_fresh_counter(chr_state);
  for (const auto& head : translated.removed) {
    bool bound = false;
    for (const auto& g : chr_state.goal) {
      Bindings attempt = env.bindings;
      if (unify(head, g, attempt)) {
        env.bindings = std::move(attempt);
        bound = true;
        break;
      }
    }
    if (!bound) {
      result.detail = "head " + to_string(head) + " has no partner";
      return result;
    }
  }
  const SolverContext ctx{chr_state.builtins, sem.config().fail_request};
  std::vector<std::string> chr_keys;
  for (const auto& genv : solve_builtins(translated.guard, env, ctx, true)) {
    for (const auto& benv : solve_builtins(translated.body_builtins, genv, ctx, false)) {
      std::vector<std::pair<std::string, Term>> gamma;
      for (const auto& a : rule.rhs) {
        const Symbol& b = a.buffer;
        gamma.emplace_back(b.str(), Term::compound("gamma", {Term::atom(b.str()),
                                                 resolve(Term::var(plan.mergeid.at(b)), benv.bindings),
                                                 resolve(Term::var(plan.resdelay.at(b)), benv.bindings)}));
      }
      ChrState s;
      s.goal = effect_goal(resolve(Term::var(plan.delta_res), benv.bindings), std::move(gamma));
      s.builtins = benv.told;
      chr_keys.push_back(canonical_key(s));
    }
  }
  result.solutions = chr_keys.size();

  std::sort(actr_keys.begin(), actr_keys.end());
  std::sort(chr_keys.begin(), chr_keys.end());
  result.match = actr_keys == chr_keys;
  if (!result.match) {
    result.detail = "effects:";
    for (const auto& k : actr_keys) result.detail += " " + k;
    result.detail += " | solutions:";
    for (const auto& k : chr_keys) result.detail += " " + k;
  }
  return result;
}

EffectLemmaResult effect_lemma_check(const Model& model, const Rule& rule, const AbstractState& state) {
  return effect_lemma_check(Semantics(model), rule, state);
}

BisimReport bisim_check(const Model& model, const AbstractState& initial, std::size_t depth, const BisimOptions& options) {
  const std::vector<Symbol> buffers = model.buffer_names();
  const Semantics sem(model, ArchitectureConfig::abstract_semantics(buffers, options.fail_request));
  std::vector<ChrRule> program;
  for (const auto& r : sem.rules()) program.push_back(chr_of_rule(r, sem.buffers(), sem.types(), options.translation));
  program.push_back(no_rule());

  BisimReport report;
  report.depth = depth;
  const TransitionGraph graph = sem.explore(initial, depth, DedupMode::Canonical);
  report.nodes = graph.nodes.size();

  for (const auto& node : graph.nodes) {
    if (node.depth >= depth) continue;
    const AbstractState& sigma = node.state;
    const std::string printed = actr::to_string(sigma);

    std::vector<Side> left;
    for (const auto& t : sem.successors(sigma)) left.push_back({t.label.str(), canonical_key(chr_of_state(t.target))});
    std::vector<Side> right;
    try {
      for (const auto& t : chr_step(chr_of_state(sigma), program, options.fail_request))
        right.push_back({t.rule, canonical_key(t.target)});
    } catch (const Undecided& e) {
      report.counterexamples.push_back({printed, Direction::Backward, "chr step", "", "", e.what()});
      continue;
    }
    report.transitions += left.size() + right.size();
    left = dedup(std::move(left));
    right = dedup(std::move(right));

    const auto partner =
        max_matching(left.size(), right.size(), [&](std::size_t i, std::size_t j) { return left[i].key == right[j].key; });
    std::vector<bool> right_used(right.size(), false);
    for (std::size_t i = 0; i < left.size(); ++i) {
      if (partner[i] != static_cast<std::size_t>(-1)) {
        right_used[partner[i]] = true;
        continue;
      }
      report.counterexamples.push_back({printed, Direction::Forward, left[i].label + " -> " + left[i].key, left[i].key,
                                        nearest(left[i].key, right), "no equivalent CHR successor"});
    }
    for (std::size_t j = 0; j < right.size(); ++j) {
      if (right_used[j]) continue;
      report.counterexamples.push_back({printed, Direction::Backward, right[j].label + " -> " + right[j].key,
                                        nearest(right[j].key, left), right[j].key, "no equivalent ACT-R successor"});
    }

    if (!options.check_effects) continue;
    for (const auto& sel : sem.select(sigma)) {
      const Rule& rule = sem.rules()[sel.rule];
      ++report.effect_checks;
      auto r = effect_lemma_check(sem, rule, sigma);
      if (!r.match) report.effect_failures.push_back(rule.name.str() + " at " + node.hash + ": " + r.detail);
    }
  }
  return report;
}

std::string BisimReport::text() const {
  std::string s = pass() ? "PASS" : "FAIL";
  s += " depth=" + std::to_string(depth) + " nodes=" + std::to_string(nodes) +
       " transitions=" + std::to_string(transitions) + " effect_checks=" + std::to_string(effect_checks) + "\n";
  for (const auto& c : counterexamples) {
    s += std::string("counterexample (") + to_string(c.direction) + "): " + c.detail + "\n";
    s += "  unmatched: " + c.transition + "\n";
    s += "  nearest actr: " + c.nearest_actr + "\n";
    s += "  nearest chr:  " + c.nearest_chr + "\n";
    s += "  at state:\n";
    std::size_t start = 0;
    while (start < c.state.size()) {
      auto end = c.state.find('\n', start);
      if (end == std::string::npos) end = c.state.size();
      s += "    " + c.state.substr(start, end - start) + "\n";
      start = end + 1;
    }
  }
  for (const auto& f : effect_failures) s += "effect lemma failure: " + f + "\n";
  return s;
}

std::string BisimReport::records() const {
  using nlohmann::json;
  std::string s = json{{"record", "summary"},
                       {"verdict", pass() ? "pass" : "fail"},
                       {"depth", depth},
                       {"nodes", nodes},
                       {"transitions", transitions},
                       {"effect_checks", effect_checks}}
                      .dump() +
                  "\n";
  for (const auto& c : counterexamples)
    s += json{{"record", "counterexample"},
              {"direction", to_string(c.direction)},
              {"state", c.state},
              {"transition", c.transition},
              {"nearest_actr", c.nearest_actr},
              {"nearest_chr", c.nearest_chr},
              {"detail", c.detail}}
             .dump() +
         "\n";
  for (const auto& f : effect_failures) s += json{{"record", "effect_failure"}, {"detail", f}}.dump() + "\n";
  return s;
}

}  // namespace actr::chr
