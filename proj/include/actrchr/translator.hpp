#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "actrchr/chr_engine.hpp"
#include "actrchr/model.hpp"

namespace actr::chr {

class NotNormalized : public std::invalid_argument {
public:
  explicit NotNormalized(const std::string& rule)
      : std::invalid_argument("rule '" + rule + "' is not in set normal form") {}
};

struct TranslationOptions {
  // Fault injection for the checker's own tests: omit the first pass-through
  // gamma constraint from every rule body that has one.
  bool drop_gamma_passthrough = false;
};

// Generated variables of one rule translation. All names are distinct from
// each other and from the rule's own variables.
struct VarPlan {
  std::string delta, delta_res, delta_new;
  std::map<Symbol, std::string> cvar, dvar, resstore, resid, resdelay, mergeid;
  Term cogstate = Term::list({});  // [(b, C_b, Dl_b)] sorted by buffer name
};

VarPlan plan_variables(const Rule& rule, const std::vector<Symbol>& buffers);

Term chr_of_value(const Value& v);

/// [chunk(id, t, [(s, v), ...]), ...] sorted by id.
Term chr_of_store(const ChunkStore& store);

/// delta(store), one gamma(b, id, delay) per buffer, upsilon as facts.
ChrState chr_of_state(const AbstractState& state);

ChrRule chr_of_rule(const Rule& rule, const std::vector<Symbol>& buffers, const TypeTable& types,
                    const TranslationOptions& options = {});

/// no @ gamma(B,C,D) <=> D > 0 | gamma(B,C,0)
ChrRule no_rule();

/// Normalized rules in declaration order, then the no rule.
std::vector<ChrRule> chr_of_model(const Model& model, const TranslationOptions& options = {});

}  // namespace actr::chr
