#pragma once

#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "actrchr/chr_term.hpp"
#include "actrchr/semantics.hpp"

namespace actr::chr {

// <G; B; V>: user constraints, builtin conjunction, global variables.
struct ChrState {
  std::vector<Term> goal;
  std::vector<Term> builtins;
  std::set<std::string> globals;

  /// `false` occurs in the builtin store.
  bool failed() const;
  static ChrState failed_state();
};

struct ChrRule {
  std::string name;
  std::vector<Term> kept;
  std::vector<Term> removed;
  std::vector<Term> guard;
  std::vector<Term> body_user;
  std::vector<Term> body_builtins;
};

/// `name @ K \ R <=> G | B` with `=`, `>` and `in` written infix.
std::string to_string(const ChrRule& rule);
/// One rule per line, each terminated by a full stop.
std::string print_program(const std::vector<ChrRule>& program);
std::string to_string(const ChrState& state);

/// A builtin store the decidable fragment cannot settle.
class Undecided : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Predicates the solver evaluates; every other builtin is a plain fact.
bool is_evaluable(const Term& constraint);

struct Environment {
  Bindings bindings;
  std::uint64_t next_fresh = 0;  // counter for c#N ids created by `action`
  std::vector<Term> told;        // facts conjoined while solving
};

struct SolverContext {
  std::vector<Term> facts;  // ground facts of the current store, e.g. dm(b)
  FailRequest fail_request = FailRequest::Nil;
};

/// Solves a conjunction, delaying each conjunct until its inputs are ground.
/// An empty result means the conjunction is unsatisfiable. Facts that are not
/// evaluable are checked against the context when `ask` is set and conjoined
/// otherwise. Throws Undecided when no conjunct can make progress.
std::vector<Environment> solve_builtins(const std::vector<Term>& conjunction, const Environment& env,
                                        const SolverContext& context, bool ask = false);

/// Largest N + 1 over all atoms c#N in the state, 0 when there are none.
std::uint64_t next_fresh_counter(const ChrState& state);

struct ChrTransition {
  std::string rule;
  ChrState target;
};

/// Every rule, every injective head matching and every guard and body
/// solution. A body with no solution yields the failed state.
std::vector<ChrTransition> chr_step(const ChrState& state, const std::vector<ChrRule>& program,
                                    FailRequest fail_request = FailRequest::Nil);

/// Evaluates the builtin store, applies the resulting substitution to the
/// goal and keeps only ground facts. Failed states collapse to failed_state().
ChrState simplify(const ChrState& state, FailRequest fail_request = FailRequest::Nil);

/// Simplified state with chunk lists sorted, fresh ids renamed canonically,
/// goal and facts sorted, and no globals.
ChrState normalize(const ChrState& state);
/// Printed normal form; "FAILED" for failed states.
std::string canonical_key(const ChrState& state);
bool state_equiv(const ChrState& a, const ChrState& b);

// Term encodings shared with the translator.
Term encode_chunk(const Chunk& chunk);
Term encode_store(const ChunkStore& store);
/// Throws std::invalid_argument on terms that are not chunk lists.
ChunkStore decode_store(const Term& list);

}  // namespace actr::chr
