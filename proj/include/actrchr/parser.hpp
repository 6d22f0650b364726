#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "actrchr/model.hpp"

namespace actr {

class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& message, SourceSpan span)
      : std::runtime_error(span.str() + ": error: " + message), span_(std::move(span)) {}

  const SourceSpan& span() const { return span_; }

private:
  SourceSpan span_;
};

// Model text format (.actr, UTF-8, `#` line comments):
//
//   type NAME { slot, ... }
//   chunk ID : TYPE { slot: VALUE, ... }
//   dm { ID, ... }
//   buffer NAME = ID [pending]
//   rule NAME {
//     BUF: TYPE { slot: VAL, ... } ...
//     ==>
//     modify BUF { slot: VAL, ... }
//     request BUF TYPE { slot: VAL, ... } ...
//   }
//
// Capitalized identifiers are variables; everything else is a constant.
// Symbol checks (unknown types, slots, ...) are left to validate().
Model parse_model(std::string_view text, const std::string& file = "<input>");

/// Canonical text; slot-value pairs follow the TypeTable slot order.
std::string print_model(const Model& model);

std::string print_rule(const Rule& rule, const TypeTable& types);

}  // namespace actr
