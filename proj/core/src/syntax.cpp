#include "hogsos/syntax.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <map>
#include <mutex>
#include <sstream>

#include "hogsos/errors.hpp"

namespace hogsos {

// ---------------------------------------------------------------------------
// TyExpr

TyExpr TyExpr::param(int index) {
  return TyExpr(std::make_shared<Node>(Node{Kind::Param, index, nullptr, nullptr}));
}

TyExpr TyExpr::unit() {
  static const TyExpr u(std::make_shared<Node>(Node{Kind::Unit, 0, nullptr, nullptr}));
  return u;
}

TyExpr TyExpr::arrow(TyExpr domain, TyExpr codomain) {
  return TyExpr(std::make_shared<Node>(
      Node{Kind::Arrow, 0, std::move(domain.node_), std::move(codomain.node_)}));
}

Ty TyExpr::instantiate(std::span<const Ty> params) const {
  switch (node_->kind) {
    case Kind::Param:
      return params[static_cast<std::size_t>(node_->param)];
    case Kind::Unit:
      return Ty::unit();
    case Kind::Arrow:
      return Ty::arrow(domain().instantiate(params), codomain().instantiate(params));
  }
  throw TypeError("corrupt TyExpr");
}

bool TyExpr::match(Ty ground, std::vector<std::optional<Ty>>& bindings) const {
  switch (node_->kind) {
    case Kind::Param: {
      auto& slot = bindings[static_cast<std::size_t>(node_->param)];
      if (slot.has_value()) return *slot == ground;
      slot = ground;
      return true;
    }
    case Kind::Unit:
      return ground.is_unit();
    case Kind::Arrow:
      return ground.is_arrow() && domain().match(ground.domain(), bindings) &&
             codomain().match(ground.codomain(), bindings);
  }
  return false;
}

// ---------------------------------------------------------------------------
// Signature

OpId Signature::add(OperatorDecl decl) {
  OpId id = static_cast<OpId>(ops_.size());
  by_name_.emplace(decl.name, id);
  ops_.push_back(std::move(decl));
  return id;
}

std::optional<OpId> Signature::find(std::string_view name) const {
  auto it = by_name_.find(std::string(name));
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

namespace xtcl {
OpId E, S, Sp, Spp, K, Kp, I, App;
}

const Signature& xtcl_signature() {
  static const Signature sig = [] {
    Signature s;
    const TyExpr a = TyExpr::param(0), b = TyExpr::param(1), c = TyExpr::param(2);
    auto arr = [](TyExpr x, TyExpr y) { return TyExpr::arrow(std::move(x), std::move(y)); };

    xtcl::E = s.add({"e", 0, {}, TyExpr::unit()});
    // S : (a -> b -> c) -> ((a -> b) -> (a -> c))
    xtcl::S = s.add({"S", 3, {}, arr(arr(a, arr(b, c)), arr(arr(a, b), arr(a, c)))});
    xtcl::Sp = s.add({"S'", 3, {arr(a, arr(b, c))}, arr(arr(a, b), arr(a, c))});
    xtcl::Spp = s.add({"S''", 3, {arr(a, arr(b, c)), arr(a, b)}, arr(a, c)});
    xtcl::K = s.add({"K", 2, {}, arr(a, arr(b, a))});
    xtcl::Kp = s.add({"K'", 2, {a}, arr(b, a)});
    xtcl::I = s.add({"I", 1, {}, arr(a, a)});
    xtcl::App = s.add({"app", 2, {arr(a, b), a}, b});
    return s;
  }();
  return sig;
}

namespace {
// Assigns the xtcl::* operator ids before main() runs.
const Signature& xtcl_signature_anchor = xtcl_signature();
}

// ---------------------------------------------------------------------------
// Term interning

namespace {

struct TermKey {
  OpId op;
  std::vector<Ty> params;
  std::vector<Term> children;

  bool operator==(const TermKey& o) const {
    if (op != o.op || params.size() != o.params.size() ||
        children.size() != o.children.size())
      return false;
    for (std::size_t i = 0; i < params.size(); ++i)
      if (params[i] != o.params[i]) return false;
    for (std::size_t i = 0; i < children.size(); ++i)
      if (children[i] != o.children[i]) return false;
    return true;
  }
};

struct TermKeyHash {
  std::size_t operator()(const TermKey& k) const {
    std::size_t h = std::hash<int>{}(k.op);
    auto mix = [&h](std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2); };
    for (Ty t : k.params) mix(t.hash());
    for (Term t : k.children) mix(t.hash());
    return h;
  }
};

}  // namespace

Term Term::make(const Signature& sig, OpId op, std::vector<Ty> params,
                std::vector<Term> children) {
  const OperatorDecl& decl = sig.op(op);
  if (static_cast<int>(params.size()) != decl.param_count)
    throw TypeError("operator " + decl.name + ": expected " +
                    std::to_string(decl.param_count) + " type parameters, got " +
                    std::to_string(params.size()));
  if (children.size() != decl.slots.size())
    throw TypeError("operator " + decl.name + ": expected " +
                    std::to_string(decl.slots.size()) + " arguments, got " +
                    std::to_string(children.size()));
  for (std::size_t i = 0; i < children.size(); ++i) {
    Ty want = decl.slots[i].instantiate(params);
    if (children[i].type() != want)
      throw TypeError("operator " + decl.name + ": argument " + std::to_string(i) +
                      " has type " + hogsos::to_string(children[i].type()) + ", expected " +
                      hogsos::to_string(want));
  }
  Ty type = decl.result.instantiate(params);

  static std::mutex mu;
  static std::unordered_map<TermKey, std::unique_ptr<Node>, TermKeyHash> table;
  std::lock_guard<std::mutex> lock(mu);
  TermKey key{op, params, children};
  auto it = table.find(key);
  if (it == table.end()) {
    int size = 1;
    for (Term c : children) size += c.size();
    auto node = std::make_unique<Node>(
        Node{op, decl.name, std::move(params), std::move(children), type, size});
    it = table.emplace(std::move(key), std::move(node)).first;
  } else if (it->second->type != type) {
    // Two signatures disagree about this operator name; refuse to conflate.
    throw TypeError("operator " + decl.name + " re-declared with a different typing");
  }
  return Term(it->second.get());
}

int Term::compare(Term a, Term b) {
  if (a.node_ == b.node_) return 0;
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  if (a.op() != b.op()) return a.op() < b.op() ? -1 : 1;
  for (std::size_t i = 0; i < a.params().size(); ++i)
    if (int c = Ty::compare(a.params()[i], b.params()[i])) return c;
  for (std::size_t i = 0; i < a.children().size(); ++i)
    if (int c = compare(a.children()[i], b.children()[i])) return c;
  return 0;
}

namespace xtcl {

Term e() { return Term::make(xtcl_signature(), E, {}, {}); }
Term s(Ty t1, Ty t2, Ty t3) { return Term::make(xtcl_signature(), S, {t1, t2, t3}, {}); }
Term sp(Ty t1, Ty t2, Ty t3, Term arg) {
  return Term::make(xtcl_signature(), Sp, {t1, t2, t3}, {arg});
}
Term spp(Ty t1, Ty t2, Ty t3, Term arg1, Term arg2) {
  return Term::make(xtcl_signature(), Spp, {t1, t2, t3}, {arg1, arg2});
}
Term k(Ty t1, Ty t2) { return Term::make(xtcl_signature(), K, {t1, t2}, {}); }
Term kp(Ty t1, Ty t2, Term arg) { return Term::make(xtcl_signature(), Kp, {t1, t2}, {arg}); }
Term i(Ty t) { return Term::make(xtcl_signature(), I, {t}, {}); }

Term app(Term fun, Term arg) {
  Ty ft = fun.type();
  if (!ft.is_arrow()) throw TypeError("app: function child has non-arrow type");
  return Term::make(xtcl_signature(), App, {ft.domain(), ft.codomain()}, {fun, arg});
}

}  // namespace xtcl

// ---------------------------------------------------------------------------
// Enumeration

namespace {

struct EnumKey {
  Ty type;
  int size;
  bool operator==(const EnumKey& o) const { return type == o.type && size == o.size; }
};
struct EnumKeyHash {
  std::size_t operator()(const EnumKey& k) const {
    return k.type.hash() * 31 + static_cast<std::size_t>(k.size);
  }
};

// Enumerates terms of exactly `size` at `type`; memoized per call of
// enumerate_terms so repeated subproblems are shared.
struct TermEnumerator {
  const Signature& sig;
  int type_bound;
  std::vector<Ty> param_candidates;  // types usable as annotations
  std::unordered_map<EnumKey, std::vector<Term>, EnumKeyHash> memo;

  const std::vector<Term>& of(Ty type, int size) {
    EnumKey key{type, size};
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    std::vector<Term> out = build(type, size);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return memo[key] = std::move(out);
  }

  std::vector<Term> build(Ty type, int size) {
    std::vector<Term> out;
    if (size < 1) return out;
    for (OpId op = 0; op < sig.op_count(); ++op) {
      const OperatorDecl& decl = sig.op(op);
      int arity = static_cast<int>(decl.slots.size());
      if (arity == 0 && size != 1) continue;
      if (arity > 0 && size < 1 + arity) continue;
      for_each_param_instantiation(decl, type, [&](std::span<const Ty> params) {
        emit_with_params(op, decl, params, type, size, out);
      });
    }
    return out;
  }

  // All ground parameter vectors that make decl's result equal `type`, with
  // every parameter of size <= type_bound. Parameters the result scheme does
  // not mention range over all candidate types.
  void for_each_param_instantiation(const OperatorDecl& decl, Ty type,
                                    const std::function<void(std::span<const Ty>)>& fn) {
    std::vector<std::optional<Ty>> bindings(static_cast<std::size_t>(decl.param_count));
    if (!decl.result.match(type, bindings)) return;
    for (auto& b : bindings)
      if (b.has_value() && b->size() > type_bound) return;
    fill_free(bindings, 0, fn);
  }

  void fill_free(std::vector<std::optional<Ty>>& bindings, std::size_t idx,
                 const std::function<void(std::span<const Ty>)>& fn) {
    if (idx == bindings.size()) {
      std::vector<Ty> params;
      params.reserve(bindings.size());
      for (auto& b : bindings) params.push_back(*b);
      fn(params);
      return;
    }
    if (bindings[idx].has_value()) {
      fill_free(bindings, idx + 1, fn);
      return;
    }
    for (Ty t : param_candidates) {
      bindings[idx] = t;
      fill_free(bindings, idx + 1, fn);
    }
    bindings[idx] = std::nullopt;
  }

  void emit_with_params(OpId op, const OperatorDecl& decl, std::span<const Ty> params, Ty type,
                        int size, std::vector<Term>& out) {
    std::vector<Ty> slot_types;
    slot_types.reserve(decl.slots.size());
    for (const TyExpr& s : decl.slots) slot_types.push_back(s.instantiate(params));
    std::vector<Ty> pvec(params.begin(), params.end());
    if (decl.slots.empty()) {
      if (size == 1) out.push_back(Term::make(sig, op, pvec, {}));
      return;
    }
    std::vector<Term> children;
    children.reserve(slot_types.size());
    distribute(op, pvec, slot_types, size - 1, children, out);
  }

  // Distributes the remaining size budget over the not-yet-built children.
  void distribute(OpId op, const std::vector<Ty>& params, const std::vector<Ty>& slot_types,
                  int budget, std::vector<Term>& children, std::vector<Term>& out) {
    const std::size_t idx = children.size();
    const int remaining_slots = static_cast<int>(slot_types.size() - idx);
    if (remaining_slots == 0) {
      if (budget == 0) out.push_back(Term::make(sig, op, params, children));
      return;
    }
    int max_here = budget - (remaining_slots - 1);
    for (int s = 1; s <= max_here; ++s) {
      for (Term t : of(slot_types[idx], s)) {
        children.push_back(t);
        distribute(op, params, slot_types, budget - s, children, out);
        children.pop_back();
      }
    }
  }
};

}  // namespace

std::vector<Term> enumerate_terms(const Signature& sig, Ty type, int size_bound,
                                  int type_bound) {
  TermEnumerator en{sig, type_bound, enumerate_types(type_bound), {}};
  std::vector<Term> out;
  for (int s = 1; s <= size_bound; ++s) {
    const std::vector<Term>& v = en.of(type, s);
    out.insert(out.end(), v.begin(), v.end());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Universe

int Universe::slice_index(Ty type) const {
  for (std::size_t i = 0; i < slices.size(); ++i)
    if (slices[i].type == type) return static_cast<int>(i);
  return -1;
}

const Universe::Slice* Universe::slice(Ty type) const {
  int i = slice_index(type);
  return i < 0 ? nullptr : &slices[static_cast<std::size_t>(i)];
}

bool Universe::contains(Term t) const {
  const Slice* s = slice(t.type());
  return s != nullptr && s->index.count(t) > 0;
}

std::int32_t Universe::member_index(Term t) const {
  const Slice* s = slice(t.type());
  if (s == nullptr) throw TypeError("term type outside universe range: " + to_string(t));
  auto it = s->index.find(t);
  if (it == s->index.end()) throw TypeError("term not a universe member: " + to_string(t));
  return it->second;
}

std::size_t Universe::total_members() const {
  std::size_t n = 0;
  for (const Slice& s : slices) n += s.members.size();
  return n;
}

bool Universe::any_truncated() const {
  for (const Slice& s : slices)
    if (s.status == ClosureStatus::truncated) return true;
  return false;
}

bool Universe::add_closure_member(Term t) {
  int i = slice_index(t.type());
  if (i < 0) return false;
  Slice& s = slices[static_cast<std::size_t>(i)];
  if (s.index.count(t)) return false;
  s.index.emplace(t, static_cast<std::int32_t>(s.members.size()));
  s.members.push_back(t);
  s.closure_added.push_back(true);
  return true;
}

Universe enumerate_universe(const Signature& sig, int size_bound, int type_bound) {
  Universe u;
  u.size_bound = size_bound;
  u.type_bound = type_bound;
  for (Ty type : enumerate_types(type_bound)) {
    Universe::Slice s{.type = type};
    s.members = enumerate_terms(sig, type, size_bound, type_bound);
    for (std::size_t i = 0; i < s.members.size(); ++i)
      s.index.emplace(s.members[i], static_cast<std::int32_t>(i));
    s.closure_added.assign(s.members.size(), false);
    u.slices.push_back(std::move(s));
  }
  return u;
}

namespace {

// Re-derives each slice's closure status by checking every member's
// obligations against the final contents.
void verify_closure(Universe& u, const UniverseSemantics& sem) {
  for (auto& s : u.slices) s.status = ClosureStatus::closed;
  for (auto& s : u.slices) {
    for (Term t : s.members) {
      for (Term target : sem.step_targets(t)) {
        if (!u.contains(target)) {
          int i = u.slice_index(target.type());
          if (i >= 0) u.slices[static_cast<std::size_t>(i)].status = ClosureStatus::truncated;
        }
      }
      if (sem.has_fun_value(t) && t.type().is_arrow()) {
        const Universe::Slice* ls = u.slice(t.type().domain());
        if (ls == nullptr) continue;
        for (Term label : ls->members) {
          Term result = sem.apply_label(t, label);
          if (!u.contains(result)) {
            int i = u.slice_index(result.type());
            if (i >= 0)
              u.slices[static_cast<std::size_t>(i)].status = ClosureStatus::truncated;
          }
        }
      }
    }
  }
}

}  // namespace

Universe close_universe(Universe u, const UniverseSemantics& sem, long fuel) {
  // Sweep until no sweep adds a member or the fuel budget (counted in added
  // terms) runs out. Labelled obligations created by additions are picked up
  // because the member and label loops re-read the growing slices by index.
  bool out_of_fuel = false;
  bool changed = true;
  while (changed && !out_of_fuel) {
    changed = false;
    for (std::size_t si = 0; si < u.slices.size() && !out_of_fuel; ++si) {
      for (std::size_t mi = 0; mi < u.slices[si].members.size() && !out_of_fuel; ++mi) {
        Term t = u.slices[si].members[mi];
        for (Term target : sem.step_targets(t)) {
          if (u.contains(target)) continue;
          if (fuel <= 0) { out_of_fuel = true; break; }
          if (u.add_closure_member(target)) { --fuel; changed = true; }
        }
        if (out_of_fuel) break;
        if (sem.has_fun_value(t) && t.type().is_arrow()) {
          int li = u.slice_index(t.type().domain());
          if (li < 0) continue;
          for (std::size_t k = 0; k < u.slices[static_cast<std::size_t>(li)].members.size();
               ++k) {
            Term label = u.slices[static_cast<std::size_t>(li)].members[k];
            Term result = sem.apply_label(t, label);
            if (u.contains(result)) continue;
            if (fuel <= 0) { out_of_fuel = true; break; }
            if (u.add_closure_member(result)) { --fuel; changed = true; }
          }
        }
      }
    }
  }
  verify_closure(u, sem);
  return u;
}

// ---------------------------------------------------------------------------
// Parsing and printing

namespace {

struct TermParser {
  const Signature& sig;
  std::string_view text;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  bool eat(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, pos); }

  std::string ident() {
    skip_ws();
    std::size_t start = pos;
    while (pos < text.size()) {
      char c = text[pos];
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'' || c == '-')
        ++pos;
      else
        break;
    }
    if (pos == start) fail("expected an identifier");
    return std::string(text.substr(start, pos - start));
  }

  Ty type() {
    skip_ws();
    std::size_t start = pos;
    // Delegate to the type parser on the remaining input; track consumption.
    int depth = 0;
    std::size_t end = pos;
    if (text.compare(pos, 4, "unit") == 0) {
      end = pos + 4;
    } else if (pos < text.size() && text[pos] == '(') {
      for (end = pos; end < text.size(); ++end) {
        if (text[end] == '(') ++depth;
        if (text[end] == ')' && --depth == 0) { ++end; break; }
      }
      if (depth != 0) fail("unterminated type");
    } else {
      fail("expected a type");
    }
    Ty t = parse_type(text.substr(start, end - start));
    pos = end;
    return t;
  }

  Term term() {
    skip_ws();
    if (pos < text.size() && text[pos] == '(') {
      std::size_t open = pos;
      ++pos;
      std::string head = ident();
      if (head != "app") throw ParseError("expected 'app'", open + 1);
      Term fun = term();
      Term arg = term();
      if (!eat(')')) fail("expected ')'");
      if (!fun.type().is_arrow())
        throw ParseError("app: function part has non-arrow type " + to_string(fun.type()),
                         open);
      if (fun.type().domain() != arg.type())
        throw ParseError("app: argument type " + to_string(arg.type()) +
                             " does not match function domain " +
                             to_string(fun.type().domain()),
                         open);
      return Term::make(sig, *sig.find("app"), {fun.type().domain(), fun.type().codomain()},
                        {fun, arg});
    }
    std::size_t at = pos;
    std::string name = ident();
    auto op = sig.find(name);
    if (!op.has_value()) throw ParseError("unknown operator '" + name + "'", at);
    const OperatorDecl& decl = sig.op(*op);
    std::vector<Ty> params;
    skip_ws();
    if (pos < text.size() && text[pos] == '[') {
      ++pos;
      params.push_back(type());
      while (eat(',')) params.push_back(type());
      if (!eat(']')) fail("expected ']'");
    }
    std::vector<Term> children;
    skip_ws();
    if (pos < text.size() && text[pos] == '(') {
      ++pos;
      children.push_back(term());
      while (eat(',')) children.push_back(term());
      if (!eat(')')) fail("expected ')'");
    }
    try {
      return Term::make(sig, *op, std::move(params), std::move(children));
    } catch (const TypeError& e) {
      throw ParseError(e.what(), at);
    }
  }
};

}  // namespace

Term parse_term(const Signature& sig, std::string_view text) {
  TermParser p{sig, text};
  Term t = p.term();
  p.skip_ws();
  if (p.pos != text.size()) throw ParseError("trailing input after term", p.pos);
  return t;
}

std::string to_string(Term t) {
  if (t.op_name() == "app" && t.children().size() == 2) {
    return "(app " + to_string(t.children()[0]) + " " + to_string(t.children()[1]) + ")";
  }
  std::string out = t.op_name();
  if (!t.params().empty()) {
    out += '[';
    for (std::size_t i = 0; i < t.params().size(); ++i) {
      if (i) out += ',';
      out += to_string(t.params()[i]);
    }
    out += ']';
  }
  if (!t.children().empty()) {
    out += '(';
    for (std::size_t i = 0; i < t.children().size(); ++i) {
      if (i) out += ',';
      out += to_string(t.children()[i]);
    }
    out += ')';
  }
  return out;
}

}  // namespace hogsos
