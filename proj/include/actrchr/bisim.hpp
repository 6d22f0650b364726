#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "actrchr/semantics.hpp"
#include "actrchr/translator.hpp"

namespace actr::chr {

enum class Direction {
  Forward,   // an ACT-R transition without an equivalent CHR transition
  Backward,  // a CHR transition without an equivalent ACT-R transition
};

const char* to_string(Direction d);

struct Counterexample {
  std::string state;       // the ACT-R state, printed
  Direction direction = Direction::Forward;
  std::string transition;  // label and target key of the unmatched transition
  std::string nearest_actr;
  std::string nearest_chr;
  std::string detail;
};

struct EffectLemmaResult {
  bool match = false;
  std::size_t effects = 0;    // |I(r, sigma)|
  std::size_t solutions = 0;  // solutions of the translated builtin chain
  std::string detail;
};

struct BisimReport {
  std::size_t depth = 0;
  std::size_t nodes = 0;
  std::size_t transitions = 0;
  std::size_t effect_checks = 0;
  std::vector<Counterexample> counterexamples;
  std::vector<std::string> effect_failures;

  bool pass() const { return counterexamples.empty() && effect_failures.empty(); }
  std::string text() const;
  /// One JSON object per line: a summary, then one per finding.
  std::string records() const;
};

struct BisimOptions {
  TranslationOptions translation;
  FailRequest fail_request = FailRequest::Nil;
  bool check_effects = true;
};

/// Compares both transition relations at every state reached within `depth`
/// steps from `initial`. States at the bound are targets only.
BisimReport bisim_check(const Model& model, const AbstractState& initial, std::size_t depth,
                        const BisimOptions& options = {});

/// Solves the builtin chain of the translated rule against the translated
/// state and pairs the solutions one-to-one with I(rule, state).
EffectLemmaResult effect_lemma_check(const Semantics& sem, const Rule& rule, const AbstractState& state);
EffectLemmaResult effect_lemma_check(const Model& model, const Rule& rule, const AbstractState& state);

}  // namespace actr::chr
