#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace actr::chr {

// First-order term over variables, atoms, integers, compounds and lists.
// A compound with an empty functor is a tuple, printed as (a,b).
class Term {
public:
  enum class Kind { Var, Atom, Int, Compound, List };

  static Term var(std::string name);
  static Term atom(std::string name);
  static Term integer(std::int64_t value);
  static Term compound(std::string functor, std::vector<Term> args);
  static Term tuple(std::vector<Term> args) { return compound("", std::move(args)); }
  static Term list(std::vector<Term> elements);

  Kind kind() const { return kind_; }
  bool is_var() const { return kind_ == Kind::Var; }
  bool is_atom() const { return kind_ == Kind::Atom; }
  bool is_int() const { return kind_ == Kind::Int; }
  bool is_compound() const { return kind_ == Kind::Compound; }
  bool is_list() const { return kind_ == Kind::List; }

  /// Variable name, atom name or functor.
  const std::string& name() const { return name_; }
  std::int64_t value() const { return value_; }
  /// Compound arguments or list elements.
  const std::vector<Term>& args() const { return args_; }
  std::vector<Term>& args() { return args_; }
  std::size_t arity() const { return args_.size(); }

  bool is(const std::string& functor, std::size_t arity) const {
    return kind_ == Kind::Compound && name_ == functor && args_.size() == arity;
  }

  bool is_ground() const;
  void collect_vars(std::set<std::string>& out) const;

  friend bool operator==(const Term& a, const Term& b) { return compare(a, b) == 0; }
  friend bool operator!=(const Term& a, const Term& b) { return compare(a, b) != 0; }
  friend bool operator<(const Term& a, const Term& b) { return compare(a, b) < 0; }

  static int compare(const Term& a, const Term& b);

private:
  Term(Kind k, std::string name, std::int64_t value, std::vector<Term> args)
      : kind_(k), name_(std::move(name)), value_(value), args_(std::move(args)) {}

  Kind kind_;
  std::string name_;
  std::int64_t value_ = 0;
  std::vector<Term> args_;
};

std::string to_string(const Term& t);
std::string join(const std::vector<Term>& terms, const std::string& sep);

using Bindings = std::map<std::string, Term>;

/// Follows variable bindings at the top level only.
const Term& walk(const Term& t, const Bindings& b);
/// Applies bindings everywhere.
Term resolve(const Term& t, const Bindings& b);
/// Syntactic unification (with occurs check); extends `b` on success and
/// leaves it unspecified on failure.
bool unify(const Term& x, const Term& y, Bindings& b);

/// Renames every variable by appending `suffix`.
Term rename_vars(const Term& t, const std::string& suffix);

}  // namespace actr::chr
