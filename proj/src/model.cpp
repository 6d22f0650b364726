#include "actrchr/model.hpp"

#include <algorithm>
#include <sstream>

namespace actr {

std::string SourceSpan::str() const {
  std::ostringstream os;
  os << (file.empty() ? "<input>" : file) << ':' << line << ':' << column;
  return os.str();
}

std::string to_string(const Value& v) {
  return std::visit([](const auto& x) { return x.str(); }, v);
}

bool is_variable(const Value& v) { return std::holds_alternative<Variable>(v); }

bool pair_less(const SlotValuePair& a, const SlotValuePair& b) {
  if (a.slot != b.slot) return a.slot < b.slot;
  return a.value < b.value;
}

namespace {

std::vector<SlotValuePair> as_set(std::vector<SlotValuePair> p) {
  std::sort(p.begin(), p.end(), pair_less);
  p.erase(std::unique(p.begin(), p.end()), p.end());
  return p;
}

void collect(const std::vector<SlotValuePair>& pairs, std::set<Variable>& out) {
  for (const auto& p : pairs)
    if (auto v = std::get_if<Variable>(&p.value)) out.insert(*v);
}

}  // namespace

bool same_pairs(const std::vector<SlotValuePair>& a, const std::vector<SlotValuePair>& b) {
  return as_set(a) == as_set(b);
}

bool operator==(const ChunkDecl& a, const ChunkDecl& b) {
  auto sorted = [](std::vector<SlotValue> v) {
    std::sort(v.begin(), v.end());
    return v;
  };
  return a.id == b.id && a.type == b.type && sorted(a.values) == sorted(b.values);
}

std::set<Variable> lhs_variables(const Rule& rule) {
  std::set<Variable> out;
  for (const auto& t : rule.lhs) collect(t.pairs, out);
  return out;
}

std::set<Variable> rhs_variables(const Rule& rule) {
  std::set<Variable> out;
  for (const auto& a : rule.rhs) collect(a.pairs, out);
  return out;
}

std::set<Variable> rule_variables(const Rule& rule) {
  auto out = lhs_variables(rule);
  auto r = rhs_variables(rule);
  out.insert(r.begin(), r.end());
  return out;
}

TypeTable Model::type_table() const {
  TypeTable t;
  for (const auto& d : types) t.declare(d.name, d.slots);
  return t;
}

std::vector<Symbol> Model::buffer_names() const {
  std::vector<Symbol> out;
  for (const auto& b : buffers) out.push_back(b.name);
  return out;
}

std::string Atom::str() const {
  std::string s = predicate.str() + "(";
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) s += ',';
    s += args[i].str();
  }
  return s + ")";
}

const BufferContent* AbstractState::buffer(const Symbol& b) const {
  for (const auto& [name, content] : gamma)
    if (name == b) return &content;
  return nullptr;
}

BufferContent* AbstractState::buffer(const Symbol& b) {
  for (auto& [name, content] : gamma)
    if (name == b) return &content;
  return nullptr;
}

AbstractState initial_state(const Model& model) {
  const TypeTable types = model.type_table();
  AbstractState s{ChunkStore::with_nil(), {}, {}};
  for (const auto& c : model.chunks) s.store.insert(make_chunk(types, c.id, c.type, c.values));
  for (const auto& b : model.buffers) s.gamma.emplace_back(b.name, BufferContent{b.chunk, b.pending});
  for (const auto& id : model.declarative) s.upsilon.push_back(Atom{Symbol("dm"), {id}});
  std::sort(s.upsilon.begin(), s.upsilon.end());
  return s;
}

const char* to_string(DiagnosticKind kind) {
  switch (kind) {
    case DiagnosticKind::DuplicateType: return "DuplicateType";
    case DiagnosticKind::DuplicateSlot: return "DuplicateSlot";
    case DiagnosticKind::ConflictingType: return "ConflictingType";
    case DiagnosticKind::UnknownType: return "UnknownType";
    case DiagnosticKind::UnknownSlot: return "UnknownSlot";
    case DiagnosticKind::MissingSlot: return "MissingSlot";
    case DiagnosticKind::DuplicateChunk: return "DuplicateChunk";
    case DiagnosticKind::UnknownChunk: return "UnknownChunk";
    case DiagnosticKind::DuplicateBuffer: return "DuplicateBuffer";
    case DiagnosticKind::UnknownBuffer: return "UnknownBuffer";
    case DiagnosticKind::ReservedIdentifier: return "ReservedIdentifier";
    case DiagnosticKind::DuplicateRule: return "DuplicateRule";
    case DiagnosticKind::NewVariableOnRhs: return "NewVariableOnRhs";
    case DiagnosticKind::DuplicateActionBuffer: return "DuplicateActionBuffer";
    case DiagnosticKind::UnknownDeclarative: return "UnknownDeclarative";
  }
  return "?";
}

std::string Diagnostic::str() const { return span.str() + ": error: " + message; }

namespace {

class Validator {
public:
  explicit Validator(const Model& m) : m_(m) {}

  std::vector<Diagnostic> run() {
    check_types();
    check_chunks();
    check_declarative();
    check_buffers();
    check_rules();
    return std::move(out_);
  }

private:
  void report(DiagnosticKind k, const SourceSpan& span, const std::vector<std::string>& args) {
    std::string msg = to_string(k);
    msg += '(';
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (i) msg += ',';
      msg += args[i];
    }
    msg += ')';
    out_.push_back({k, std::move(msg), span});
  }

  void reserved(const Symbol& s, const SourceSpan& span) {
    if (s.str().rfind(kFreshPrefix, 0) == 0) report(DiagnosticKind::ReservedIdentifier, span, {s.str()});
  }

  void check_types() {
    for (const auto& d : m_.types) {
      reserved(d.name, d.span);
      std::set<Symbol> slots;
      bool ok = true;
      for (const auto& s : d.slots) {
        if (!slots.insert(s).second) {
          report(DiagnosticKind::DuplicateSlot, d.span, {d.name.str(), s.str()});
          ok = false;
        }
      }
      if (d.name == chunk_type_symbol() && !d.slots.empty()) {
        report(DiagnosticKind::ConflictingType, d.span, {d.name.str()});
        continue;
      }
      auto it = types_.find(d.name);
      if (it != types_.end()) {
        if (it->second != d.slots) report(DiagnosticKind::ConflictingType, d.span, {d.name.str()});
        else if (d.name != chunk_type_symbol()) report(DiagnosticKind::DuplicateType, d.span, {d.name.str()});
        continue;
      }
      if (ok) types_.emplace(d.name, d.slots);
    }
    types_.emplace(chunk_type_symbol(), std::vector<Symbol>{});
  }

  const std::vector<Symbol>* slots_of(const Symbol& type) const {
    auto it = types_.find(type);
    return it == types_.end() ? nullptr : &it->second;
  }

  static bool has(const std::vector<Symbol>& v, const Symbol& s) { return std::find(v.begin(), v.end(), s) != v.end(); }

  void check_chunks() {
    chunk_ids_.insert(nil_symbol());
    for (const auto& c : m_.chunks) {
      reserved(c.id, c.span);
      if (c.id == nil_symbol() || !chunk_ids_.insert(c.id).second)
        report(DiagnosticKind::DuplicateChunk, c.span, {c.id.str()});
    }
    for (const auto& c : m_.chunks) {
      const auto* slots = slots_of(c.type);
      if (!slots) {
        report(DiagnosticKind::UnknownType, c.span, {c.id.str(), c.type.str()});
        continue;
      }
      std::set<Symbol> given;
      for (const auto& sv : c.values) {
        if (!has(*slots, sv.slot)) report(DiagnosticKind::UnknownSlot, c.span, {c.id.str(), sv.slot.str()});
        else if (!given.insert(sv.slot).second) report(DiagnosticKind::DuplicateSlot, c.span, {c.id.str(), sv.slot.str()});
        if (!chunk_ids_.count(sv.value)) report(DiagnosticKind::UnknownChunk, c.span, {c.id.str(), sv.value.str()});
      }
      for (const auto& s : *slots)
        if (!given.count(s)) report(DiagnosticKind::MissingSlot, c.span, {c.id.str(), s.str()});
    }
  }

  void check_declarative() {
    for (const auto& id : m_.declarative)
      if (!chunk_ids_.count(id)) report(DiagnosticKind::UnknownDeclarative, {}, {id.str()});
  }

  void check_buffers() {
    for (const auto& b : m_.buffers) {
      if (!buffers_.insert(b.name).second) report(DiagnosticKind::DuplicateBuffer, b.span, {b.name.str()});
      if (!chunk_ids_.count(b.chunk)) report(DiagnosticKind::UnknownChunk, b.span, {b.name.str(), b.chunk.str()});
    }
  }

  void check_pairs(const Rule& r, const Symbol& type, const std::vector<SlotValuePair>& pairs) {
    const auto* slots = slots_of(type);
    for (const auto& p : pairs) {
      if (slots && !has(*slots, p.slot)) report(DiagnosticKind::UnknownSlot, p.span, {r.name.str(), p.slot.str()});
      if (auto c = std::get_if<Symbol>(&p.value)) reserved(*c, p.span);
    }
  }

  void check_rules() {
    std::set<Symbol> names;
    for (const auto& r : m_.rules) {
      if (!names.insert(r.name).second) report(DiagnosticKind::DuplicateRule, r.span, {r.name.str()});
      std::map<Symbol, Symbol> tested;
      for (const auto& t : r.lhs) {
        if (!buffers_.count(t.buffer)) report(DiagnosticKind::UnknownBuffer, t.span, {r.name.str(), t.buffer.str()});
        if (!slots_of(t.type)) report(DiagnosticKind::UnknownType, t.span, {r.name.str(), t.type.str()});
        tested.emplace(t.buffer, t.type);
        check_pairs(r, t.type, t.pairs);
      }
      std::set<Symbol> acted;
      for (const auto& a : r.rhs) {
        std::set<Symbol> written;
        for (const auto& p : a.pairs)
          if (!written.insert(p.slot).second)
            report(DiagnosticKind::DuplicateSlot, p.span, {r.name.str(), p.slot.str()});
        if (!buffers_.count(a.buffer)) report(DiagnosticKind::UnknownBuffer, a.span, {r.name.str(), a.buffer.str()});
        if (!acted.insert(a.buffer).second)
          report(DiagnosticKind::DuplicateActionBuffer, a.span, {a.buffer.str()});
        if (a.kind == ActionKind::Request) {
          if (!a.type || !slots_of(*a.type)) {
            report(DiagnosticKind::UnknownType, a.span, {r.name.str(), a.type ? a.type->str() : "_"});
          } else {
            check_pairs(r, *a.type, a.pairs);
          }
        } else if (auto it = tested.find(a.buffer); it != tested.end()) {
          check_pairs(r, it->second, a.pairs);
        }
      }
      const auto lhs = lhs_variables(r);
      std::set<Variable> reported;
      for (const auto& a : r.rhs) {
        for (const auto& p : a.pairs) {
          auto v = std::get_if<Variable>(&p.value);
          if (v && !lhs.count(*v) && reported.insert(*v).second)
            report(DiagnosticKind::NewVariableOnRhs, p.span, {r.name.str(), v->str()});
        }
      }
    }
  }

  const Model& m_;
  std::map<Symbol, std::vector<Symbol>> types_;
  std::set<Symbol> chunk_ids_;
  std::set<Symbol> buffers_;
  std::vector<Diagnostic> out_;
};

}  // namespace

std::vector<Diagnostic> validate(const Model& model) { return Validator(model).run(); }

}  // namespace actr
