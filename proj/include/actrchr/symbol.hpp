#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>

namespace actr {

/// A constant of the model language: chunk ids, types, slots, buffers.
class Symbol {
public:
  explicit Symbol(std::string name) : name_(std::move(name)) {
    if (name_.empty()) throw std::invalid_argument("empty symbol name");
  }

  const std::string& str() const { return name_; }

  friend bool operator==(const Symbol&, const Symbol&) = default;
  friend auto operator<=>(const Symbol&, const Symbol&) = default;

private:
  std::string name_;
};

/// A logical variable of a rule. Lives in a namespace disjoint from Symbol;
/// a Variable and a Symbol with the same spelling never compare equal.
class Variable {
public:
  explicit Variable(std::string name) : name_(std::move(name)) {
    if (name_.empty()) throw std::invalid_argument("empty variable name");
  }

  const std::string& str() const { return name_; }

  friend bool operator==(const Variable&, const Variable&) = default;
  friend auto operator<=>(const Variable&, const Variable&) = default;

private:
  std::string name_;
};

inline std::ostream& operator<<(std::ostream& os, const Symbol& s) { return os << s.str(); }
inline std::ostream& operator<<(std::ostream& os, const Variable& v) { return os << v.str(); }

inline const Symbol& nil_symbol() {
  static const Symbol nil{"nil"};
  return nil;
}

inline const Symbol& chunk_type_symbol() {
  static const Symbol chunk{"chunk"};
  return chunk;
}

}  // namespace actr

template <>
struct std::hash<actr::Symbol> {
  std::size_t operator()(const actr::Symbol& s) const noexcept { return std::hash<std::string>{}(s.str()); }
};

template <>
struct std::hash<actr::Variable> {
  std::size_t operator()(const actr::Variable& v) const noexcept {
    return std::hash<std::string>{}(v.str()) ^ 0x9e3779b97f4a7c15ULL;
  }
};
