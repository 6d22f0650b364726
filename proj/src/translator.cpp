#include "actrchr/translator.hpp"

#include <algorithm>
#include <set>

namespace actr::chr {

namespace {

class Namer {
public:
  explicit Namer(const Rule& rule) {
    for (const auto& v : rule_variables(rule)) used_.insert(v.str());
  }

  std::string take(std::string name) {
    while (used_.count(name)) name += "_";
    used_.insert(name);
    return name;
  }

private:
  std::set<std::string> used_;
};

Term pairs_term(const std::vector<SlotValuePair>& pairs) {
  std::vector<Term> out;
  for (const auto& p : pairs) out.push_back(Term::tuple({Term::atom(p.slot.str()), chr_of_value(p.value)}));
  return Term::list(std::move(out));
}

}  // namespace

Term chr_of_value(const Value& v) {
  if (auto var = std::get_if<Variable>(&v)) return Term::var(var->str());
  return Term::atom(std::get<Symbol>(v).str());
}

VarPlan plan_variables(const Rule& rule, const std::vector<Symbol>& buffers) {
  Namer names(rule);
  VarPlan plan;
  plan.delta = names.take("Delta");
  plan.delta_res = names.take("DeltaRes");
  plan.delta_new = names.take("DeltaNew");
  for (const auto& b : buffers) {
    plan.cvar[b] = names.take("C_" + b.str());
    plan.dvar[b] = names.take("Dl_" + b.str());
  }
  for (const auto& a : rule.rhs) {
    const Symbol& b = a.buffer;
    plan.resstore[b] = names.take("Dres_" + b.str());
    plan.resid[b] = names.take("Cres_" + b.str());
    plan.resdelay[b] = names.take("Eres_" + b.str());
    plan.mergeid[b] = names.take("M_" + b.str());
  }
  std::vector<Symbol> sorted = buffers;
  std::sort(sorted.begin(), sorted.end());
  std::vector<Term> entries;
  for (const auto& b : sorted)
    entries.push_back(Term::tuple({Term::atom(b.str()), Term::var(plan.cvar[b]), Term::var(plan.dvar[b])}));
  plan.cogstate = Term::list(std::move(entries));
  return plan;
}

Term chr_of_store(const ChunkStore& store) { return encode_store(store); }

ChrState chr_of_state(const AbstractState& state) {
  ChrState s;
  s.goal.push_back(Term::compound("delta", {chr_of_store(state.store)}));
  for (const auto& [b, content] : state.gamma)
    s.goal.push_back(Term::compound(
        "gamma", {Term::atom(b.str()), Term::atom(content.chunk.str()), Term::integer(content.pending ? 1 : 0)}));
  for (const auto& atom : state.upsilon) {
    if (atom.args.empty()) {
      s.builtins.push_back(Term::atom(atom.predicate.str()));
      continue;
    }
    std::vector<Term> args;
    for (const auto& a : atom.args) args.push_back(Term::atom(a.str()));
    s.builtins.push_back(Term::compound(atom.predicate.str(), std::move(args)));
  }
  return s;
}

ChrRule chr_of_rule(const Rule& rule, const std::vector<Symbol>& buffers, const TypeTable& types,
                    const TranslationOptions& options) {
  if (!is_set_normal_form(rule, types)) throw NotNormalized(rule.name.str());
  const VarPlan plan = plan_variables(rule, buffers);
  const Term delta = Term::var(plan.delta);

  ChrRule out;
  out.name = rule.name.str();
  out.removed.push_back(Term::compound("delta", {delta}));
  for (const auto& b : buffers)
    out.removed.push_back(
        Term::compound("gamma", {Term::atom(b.str()), Term::var(plan.cvar.at(b)), Term::var(plan.dvar.at(b))}));

  for (const auto& t : rule.lhs) {
    Term chunk = Term::compound("chunk", {Term::var(plan.cvar.at(t.buffer)), Term::atom(t.type.str()), pairs_term(t.pairs)});
    out.guard.push_back(Term::compound("in", {std::move(chunk), delta}));
    out.guard.push_back(Term::compound("=", {Term::var(plan.dvar.at(t.buffer)), Term::integer(0)}));
  }

  out.body_user.push_back(Term::compound("delta", {Term::var(plan.delta_new)}));
  bool dropped = false;
  for (const auto& b : buffers) {
    if (plan.mergeid.count(b)) {
      out.body_user.push_back(
          Term::compound("gamma", {Term::atom(b.str()), Term::var(plan.mergeid.at(b)), Term::var(plan.resdelay.at(b))}));
    } else if (options.drop_gamma_passthrough && !dropped) {
      dropped = true;
    } else {
      out.body_user.push_back(
          Term::compound("gamma", {Term::atom(b.str()), Term::var(plan.cvar.at(b)), Term::var(plan.dvar.at(b))}));
    }
  }

  std::vector<Term> results;
  for (const auto& a : rule.rhs) {
    const Symbol& b = a.buffer;
    Term alpha = a.kind == ActionKind::Modify
                     ? Term::compound("=", {Term::atom(b.str()), Term::atom("_"), pairs_term(a.pairs)})
                     : Term::compound("+", {Term::atom(b.str()), Term::atom(a.type.value_or(chunk_type_symbol()).str()),
                                            pairs_term(a.pairs)});
    out.body_builtins.push_back(Term::compound(
        "action", {std::move(alpha), delta, plan.cogstate, Term::var(plan.resstore.at(b)), Term::var(plan.resid.at(b)),
                   Term::var(plan.resdelay.at(b))}));
    results.push_back(Term::var(plan.resstore.at(b)));
  }
  out.body_builtins.push_back(Term::compound("merge", {Term::list(results), Term::var(plan.delta_res)}));
  out.body_builtins.push_back(
      Term::compound("merge", {Term::list({delta, Term::var(plan.delta_res)}), Term::var(plan.delta_new)}));
  for (const auto& a : rule.rhs) {
    const Symbol& b = a.buffer;
    out.body_builtins.push_back(Term::compound(
        "map", {delta, Term::var(plan.delta_res), Term::var(plan.resid.at(b)), Term::var(plan.mergeid.at(b))}));
  }
  return out;
}

ChrRule no_rule() {
  const Term b = Term::var("B"), c = Term::var("C"), d = Term::var("D");
  ChrRule r;
  r.name = "no";
  r.removed.push_back(Term::compound("gamma", {b, c, d}));
  r.guard.push_back(Term::compound(">", {d, Term::integer(0)}));
  r.body_user.push_back(Term::compound("gamma", {b, c, Term::integer(0)}));
  return r;
}

std::vector<ChrRule> chr_of_model(const Model& model, const TranslationOptions& options) {
  const Semantics sem(model);
  std::vector<ChrRule> out;
  for (const auto& r : sem.rules()) out.push_back(chr_of_rule(r, sem.buffers(), sem.types(), options));
  out.push_back(no_rule());
  return out;
}

}  // namespace actr::chr
