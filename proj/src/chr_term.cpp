#include "actrchr/chr_term.hpp"

#include <cctype>

namespace actr::chr {

Term Term::var(std::string name) { return Term(Kind::Var, std::move(name), 0, {}); }
Term Term::atom(std::string name) { return Term(Kind::Atom, std::move(name), 0, {}); }
Term Term::integer(std::int64_t value) { return Term(Kind::Int, {}, value, {}); }
Term Term::compound(std::string functor, std::vector<Term> args) {
  return Term(Kind::Compound, std::move(functor), 0, std::move(args));
}
Term Term::list(std::vector<Term> elements) { return Term(Kind::List, {}, 0, std::move(elements)); }

bool Term::is_ground() const {
  if (kind_ == Kind::Var) return false;
  for (const auto& a : args_)
    if (!a.is_ground()) return false;
  return true;
}

void Term::collect_vars(std::set<std::string>& out) const {
  if (kind_ == Kind::Var) out.insert(name_);
  for (const auto& a : args_) a.collect_vars(out);
}

int Term::compare(const Term& a, const Term& b) {
  if (a.kind_ != b.kind_) return a.kind_ < b.kind_ ? -1 : 1;
  if (a.kind_ == Kind::Int) return a.value_ < b.value_ ? -1 : (a.value_ > b.value_ ? 1 : 0);
  if (int c = a.name_.compare(b.name_)) return c < 0 ? -1 : 1;
  if (a.args_.size() != b.args_.size()) return a.args_.size() < b.args_.size() ? -1 : 1;
  for (std::size_t i = 0; i < a.args_.size(); ++i)
    if (int c = compare(a.args_[i], b.args_[i])) return c;
  return 0;
}

namespace {

bool plain_atom(const std::string& s) {
  if (s.empty()) return false;
  bool digits = true;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) digits = false;
  if (digits) return true;
  if (!std::islower(static_cast<unsigned char>(s[0]))) return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

std::string quote(const std::string& s) {
  if (plain_atom(s)) return s;
  std::string out = "'";
  for (char c : s) {
    if (c == '\'' || c == '\\') out += '\\';
    out += c;
  }
  return out + "'";
}

bool infix(const Term& t) {
  return t.is_compound() && t.arity() == 2 && (t.name() == "=" || t.name() == ">" || t.name() == "in");
}

}  // namespace

std::string join(const std::vector<Term>& terms, const std::string& sep) {
  std::string s;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (i) s += sep;
    s += to_string(terms[i]);
  }
  return s;
}

std::string to_string(const Term& t) {
  switch (t.kind()) {
    case Term::Kind::Var: return t.name();
    case Term::Kind::Atom: return quote(t.name());
    case Term::Kind::Int: return std::to_string(t.value());
    case Term::Kind::List: return "[" + join(t.args(), ",") + "]";
    case Term::Kind::Compound:
      if (t.name().empty()) return "(" + join(t.args(), ",") + ")";
      if (infix(t)) return to_string(t.args()[0]) + " " + t.name() + " " + to_string(t.args()[1]);
      if (t.name() == "=" || t.name() == "+") return t.name() + "(" + join(t.args(), ",") + ")";
      return quote(t.name()) + "(" + join(t.args(), ",") + ")";
  }
  return "?";
}

const Term& walk(const Term& t, const Bindings& b) {
  const Term* cur = &t;
  while (cur->is_var()) {
    auto it = b.find(cur->name());
    if (it == b.end()) break;
    cur = &it->second;
  }
  return *cur;
}

Term resolve(const Term& t, const Bindings& b) {
  const Term& w = walk(t, b);
  if (w.args().empty()) return w;
  Term out = w;
  for (auto& a : out.args()) a = resolve(a, b);
  return out;
}

namespace {

bool occurs(const std::string& var, const Term& t, const Bindings& b) {
  const Term& w = walk(t, b);
  if (w.is_var()) return w.name() == var;
  for (const auto& a : w.args())
    if (occurs(var, a, b)) return true;
  return false;
}

}  // namespace

bool unify(const Term& x, const Term& y, Bindings& b) {
  const Term& a = walk(x, b);
  const Term& c = walk(y, b);
  if (a.is_var() && c.is_var() && a.name() == c.name()) return true;
  if (a.is_var()) {
    if (occurs(a.name(), c, b)) return false;
    b.insert_or_assign(a.name(), c);
    return true;
  }
  if (c.is_var()) {
    if (occurs(c.name(), a, b)) return false;
    b.insert_or_assign(c.name(), a);
    return true;
  }
  if (a.kind() != c.kind()) return false;
  if (a.is_int()) return a.value() == c.value();
  if (a.name() != c.name() || a.arity() != c.arity()) return false;
  const std::vector<Term> left = a.args();
  const std::vector<Term> right = c.args();
  for (std::size_t i = 0; i < left.size(); ++i)
    if (!unify(left[i], right[i], b)) return false;
  return true;
}

Term rename_vars(const Term& t, const std::string& suffix) {
  if (t.is_var()) return Term::var(t.name() + suffix);
  if (t.args().empty()) return t;
  Term out = t;
  for (auto& a : out.args()) a = rename_vars(a, suffix);
  return out;
}

}  // namespace actr::chr
