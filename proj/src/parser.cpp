#include "actrchr/parser.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>
#include <vector>

namespace actr {

namespace {

enum class Tok { Ident, LBrace, RBrace, Colon, Comma, Equals, Arrow, End };

struct Token {
  Tok kind;
  std::string text;
  SourceSpan span;
};

const char* describe(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::Colon: return "':'";
    case Tok::Comma: return "','";
    case Tok::Equals: return "'='";
    case Tok::Arrow: return "'==>'";
    case Tok::End: return "end of input";
  }
  return "?";
}

bool ident_start(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return ident_start(c) || c == '#' || c == '-' || c == '\''; }

class Lexer {
public:
  Lexer(std::string_view text, std::string file) : text_(text), file_(std::move(file)) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      if (pos_ >= text_.size()) {
        out.push_back({Tok::End, "", span(line_, col_, line_, col_)});
        return out;
      }
      const int l = line_, c = col_;
      const char ch = text_[pos_];
      if (text_.substr(pos_, 3) == "==>") {
        advance(3);
        out.push_back({Tok::Arrow, "==>", span(l, c, line_, col_)});
      } else if (ident_start(ch)) {
        std::size_t start = pos_;
        while (pos_ < text_.size() && ident_char(text_[pos_])) advance(1);
        out.push_back({Tok::Ident, std::string(text_.substr(start, pos_ - start)), span(l, c, line_, col_)});
      } else {
        Tok kind;
        switch (ch) {
          case '{': kind = Tok::LBrace; break;
          case '}': kind = Tok::RBrace; break;
          case ':': kind = Tok::Colon; break;
          case ',': kind = Tok::Comma; break;
          case '=': kind = Tok::Equals; break;
          default:
            throw ParseError(std::string("unexpected character '") + ch + "'", span(l, c, l, c + 1));
        }
        advance(1);
        out.push_back({kind, std::string(1, ch), span(l, c, line_, col_)});
      }
    }
  }

private:
  SourceSpan span(int l, int c, int el, int ec) const { return {file_, l, c, el, ec}; }

  void advance(std::size_t n) {
    for (std::size_t i = 0; i < n && pos_ < text_.size(); ++i) {
      if (text_[pos_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
      ++pos_;
    }
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      const char ch = text_[pos_];
      if (ch == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance(1);
      } else if (std::isspace(static_cast<unsigned char>(ch))) {
        advance(1);
      } else {
        return;
      }
    }
  }

  std::string_view text_;
  std::string file_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

bool is_variable_name(const std::string& s) {
  return !s.empty() && std::isupper(static_cast<unsigned char>(s[0]));
}

class Parser {
public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Model run() {
    Model m;
    while (peek().kind != Tok::End) {
      const Token& kw = expect_ident();
      if (kw.text == "type") parse_type(m, kw.span);
      else if (kw.text == "chunk") parse_chunk(m, kw.span);
      else if (kw.text == "dm") parse_dm(m);
      else if (kw.text == "buffer") parse_buffer(m, kw.span);
      else if (kw.text == "rule") parse_rule(m, kw.span);
      else throw ParseError("expected 'type', 'chunk', 'dm', 'buffer' or 'rule', found '" + kw.text + "'", kw.span);
    }
    return m;
  }

private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  const Token& expect(Tok kind) {
    const Token& t = peek();
    if (t.kind != kind) {
      std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
      throw ParseError(std::string("expected ") + describe(kind) + ", found " + found, t.span);
    }
    return next();
  }

  const Token& expect_ident() { return expect(Tok::Ident); }

  Symbol expect_constant(const char* what) {
    const Token& t = expect_ident();
    if (is_variable_name(t.text)) throw ParseError(std::string("expected constant ") + what + ", found variable '" + t.text + "'", t.span);
    return Symbol(t.text);
  }

  bool accept(Tok kind) {
    if (peek().kind != kind) return false;
    next();
    return true;
  }

  void parse_type(Model& m, const SourceSpan& start) {
    TypeDecl d{expect_constant("type name"), {}, start};
    expect(Tok::LBrace);
    if (!accept(Tok::RBrace)) {
      do d.slots.push_back(expect_constant("slot name"));
      while (accept(Tok::Comma));
      expect(Tok::RBrace);
    }
    // `type chunk {}` restates the built-in type.
    if (d.name == chunk_type_symbol() && d.slots.empty()) return;
    m.types.push_back(std::move(d));
  }

  void parse_chunk(Model& m, const SourceSpan& start) {
    Symbol id = expect_constant("chunk id");
    expect(Tok::Colon);
    Symbol type = expect_constant("type name");
    ChunkDecl c{std::move(id), std::move(type), {}, start};
    expect(Tok::LBrace);
    if (!accept(Tok::RBrace)) {
      do {
        Symbol slot = expect_constant("slot name");
        expect(Tok::Colon);
        c.values.push_back({std::move(slot), expect_constant("chunk value")});
      } while (accept(Tok::Comma));
      expect(Tok::RBrace);
    }
    m.chunks.push_back(std::move(c));
  }

  void parse_dm(Model& m) {
    expect(Tok::LBrace);
    if (accept(Tok::RBrace)) return;
    do m.declarative.push_back(expect_constant("chunk id"));
    while (accept(Tok::Comma));
    expect(Tok::RBrace);
  }

  void parse_buffer(Model& m, const SourceSpan& start) {
    BufferDecl b{expect_constant("buffer name"), Symbol("nil"), false, start};
    expect(Tok::Equals);
    b.chunk = expect_constant("chunk id");
    if (peek().kind == Tok::Ident && peek().text == "pending") {
      next();
      b.pending = true;
    }
    m.buffers.push_back(std::move(b));
  }

  std::vector<SlotValuePair> parse_pairs() {
    std::vector<SlotValuePair> out;
    expect(Tok::LBrace);
    if (accept(Tok::RBrace)) return out;
    do {
      const Token& slot = expect_ident();
      if (is_variable_name(slot.text)) throw ParseError("expected constant slot name, found variable '" + slot.text + "'", slot.span);
      expect(Tok::Colon);
      const Token& val = expect_ident();
      Value v = is_variable_name(val.text) ? Value(Variable(val.text)) : Value(Symbol(val.text));
      SourceSpan span = slot.span;
      span.end_line = val.span.end_line;
      span.end_column = val.span.end_column;
      out.push_back({Symbol(slot.text), std::move(v), span});
    } while (accept(Tok::Comma));
    expect(Tok::RBrace);
    return out;
  }

  void parse_rule(Model& m, const SourceSpan& start) {
    Rule r{expect_constant("rule name"), {}, {}, start};
    expect(Tok::LBrace);
    while (peek().kind != Tok::Arrow) {
      const SourceSpan span = peek().span;
      Symbol buffer = expect_constant("buffer name");
      expect(Tok::Colon);
      Symbol type = expect_constant("type name");
      r.lhs.push_back({std::move(buffer), std::move(type), parse_pairs(), span});
    }
    expect(Tok::Arrow);
    while (!accept(Tok::RBrace)) {
      const Token& kw = expect_ident();
      if (kw.text == "modify") {
        Symbol buffer = expect_constant("buffer name");
        r.rhs.push_back({ActionKind::Modify, std::move(buffer), std::nullopt, parse_pairs(), kw.span});
      } else if (kw.text == "request") {
        Symbol buffer = expect_constant("buffer name");
        Symbol type = expect_constant("type name");
        r.rhs.push_back({ActionKind::Request, std::move(buffer), std::move(type), parse_pairs(), kw.span});
      } else {
        throw ParseError("expected 'modify', 'request' or '}', found '" + kw.text + "'", kw.span);
      }
    }
    m.rules.push_back(std::move(r));
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

// Sort pairs by the slot order of `type` when it is known, else by name.
std::vector<SlotValuePair> ordered(std::vector<SlotValuePair> pairs, const TypeTable& types,
                                   const std::optional<Symbol>& type) {
  auto key = [&](const SlotValuePair& p) -> std::size_t {
    if (type) {
      if (auto i = types.slot_index(*type, p.slot)) return *i;
    }
    return static_cast<std::size_t>(-1);
  };
  std::stable_sort(pairs.begin(), pairs.end(), [&](const SlotValuePair& a, const SlotValuePair& b) {
    const auto ka = key(a), kb = key(b);
    if (ka != kb) return ka < kb;
    if (ka == static_cast<std::size_t>(-1)) return a.slot < b.slot;
    return false;
  });
  return pairs;
}

void print_pairs(std::ostream& os, const std::vector<SlotValuePair>& pairs) {
  os << '{';
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    os << (i ? ", " : " ") << pairs[i].slot << ": " << to_string(pairs[i].value);
  }
  os << (pairs.empty() ? "}" : " }");
}

// A TypeTable built leniently from possibly invalid declarations.
TypeTable lenient_types(const Model& m) {
  TypeTable t;
  for (const auto& d : m.types) {
    try {
      t.declare(d.name, d.slots);
    } catch (const std::invalid_argument&) {
    }
  }
  return t;
}

}  // namespace

Model parse_model(std::string_view text, const std::string& file) {
  return Parser(Lexer(text, file).run()).run();
}

std::string print_rule(const Rule& rule, const TypeTable& types) {
  std::ostringstream os;
  std::map<Symbol, Symbol> tested;
  for (const auto& t : rule.lhs) tested.emplace(t.buffer, t.type);
  os << "rule " << rule.name << " {\n";
  for (const auto& t : rule.lhs) {
    os << "  " << t.buffer << ": " << t.type << ' ';
    print_pairs(os, ordered(t.pairs, types, t.type));
    os << '\n';
  }
  os << "  ==>\n";
  for (const auto& a : rule.rhs) {
    if (a.kind == ActionKind::Modify) {
      os << "  modify " << a.buffer << ' ';
      auto it = tested.find(a.buffer);
      print_pairs(os, ordered(a.pairs, types, it == tested.end() ? std::nullopt : std::optional<Symbol>(it->second)));
    } else {
      os << "  request " << a.buffer << ' ' << (a.type ? a.type->str() : "_") << ' ';
      print_pairs(os, ordered(a.pairs, types, a.type));
    }
    os << '\n';
  }
  os << "}\n";
  return os.str();
}

std::string print_model(const Model& model) {
  const TypeTable types = lenient_types(model);
  std::ostringstream os;
  for (const auto& t : model.types) {
    os << "type " << t.name << " {";
    for (std::size_t i = 0; i < t.slots.size(); ++i) os << (i ? ", " : " ") << t.slots[i];
    os << (t.slots.empty() ? "}\n" : " }\n");
  }
  if (!model.types.empty()) os << '\n';
  for (const auto& c : model.chunks) {
    std::vector<SlotValuePair> pairs;
    for (const auto& sv : c.values) pairs.push_back({sv.slot, sv.value, {}});
    os << "chunk " << c.id << " : " << c.type << ' ';
    print_pairs(os, ordered(pairs, types, c.type));
    os << '\n';
  }
  if (!model.chunks.empty()) os << '\n';
  if (!model.declarative.empty()) {
    os << "dm {";
    for (std::size_t i = 0; i < model.declarative.size(); ++i) os << (i ? ", " : " ") << model.declarative[i];
    os << " }\n\n";
  }
  for (const auto& b : model.buffers) os << "buffer " << b.name << " = " << b.chunk << (b.pending ? " pending\n" : "\n");
  for (const auto& r : model.rules) os << '\n' << print_rule(r, types);
  return os.str();
}

}  // namespace actr
