#include "hogsos/types.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <memory>
#include <mutex>

#include "hogsos/errors.hpp"

namespace hogsos {

Ty Ty::unit() {
  static const Node node{nullptr, nullptr, 1};
  return Ty(&node);
}

Ty Ty::arrow(Ty domain, Ty codomain) {
  static std::mutex mu;
  static std::map<std::pair<const Node*, const Node*>, std::unique_ptr<Node>> table;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(domain.node_, codomain.node_);
  auto it = table.find(key);
  if (it == table.end()) {
    auto node = std::make_unique<Node>(
        Node{domain.node_, codomain.node_, domain.node_->size + codomain.node_->size});
    it = table.emplace(key, std::move(node)).first;
  }
  return Ty(it->second.get());
}

Ty Ty::domain() const { return Ty(node_->dom); }
Ty Ty::codomain() const { return Ty(node_->cod); }

int Ty::compare(Ty a, Ty b) {
  if (a.node_ == b.node_) return 0;
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  if (a.is_unit() != b.is_unit()) return a.is_unit() ? -1 : 1;
  if (a.is_unit()) return 0;
  if (int c = compare(a.domain(), b.domain())) return c;
  return compare(a.codomain(), b.codomain());
}

std::vector<Ty> enumerate_types(int max_size) {
  // by_size[s] holds all types of size exactly s, sorted structurally.
  std::vector<std::vector<Ty>> by_size(static_cast<std::size_t>(std::max(max_size, 0)) + 1);
  for (int s = 1; s <= max_size; ++s) {
    std::vector<Ty>& out = by_size[static_cast<std::size_t>(s)];
    if (s == 1) out.push_back(Ty::unit());
    for (int ds = 1; ds < s; ++ds) {
      for (Ty d : by_size[static_cast<std::size_t>(ds)])
        for (Ty c : by_size[static_cast<std::size_t>(s - ds)]) out.push_back(Ty::arrow(d, c));
    }
    std::sort(out.begin(), out.end());
  }
  std::vector<Ty> all;
  for (int s = 1; s <= max_size; ++s)
    all.insert(all.end(), by_size[static_cast<std::size_t>(s)].begin(),
               by_size[static_cast<std::size_t>(s)].end());
  return all;
}

namespace {

struct TyParser {
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

  Ty parse() {
    skip_ws();
    if (text.compare(pos, 4, "unit") == 0) {
      pos += 4;
      return Ty::unit();
    }
    if (eat('(')) {
      skip_ws();
      if (text.compare(pos, 2, "->") != 0) fail("expected '->'");
      pos += 2;
      std::vector<Ty> parts;
      parts.push_back(parse());
      parts.push_back(parse());
      skip_ws();
      while (!eat(')')) {
        if (pos >= text.size()) fail("unterminated arrow type");
        parts.push_back(parse());
        skip_ws();
      }
      Ty result = parts.back();
      for (std::size_t i = parts.size() - 1; i-- > 0;) result = Ty::arrow(parts[i], result);
      return result;
    }
    fail("expected 'unit' or '(->'");
  }
};

}  // namespace

Ty parse_type(std::string_view text) {
  TyParser p{text};
  Ty t = p.parse();
  p.skip_ws();
  if (p.pos != text.size()) throw ParseError("trailing input after type", p.pos);
  return t;
}

std::string to_string(Ty t) {
  if (t.is_unit()) return "unit";
  return "(-> " + to_string(t.domain()) + " " + to_string(t.codomain()) + ")";
}

}  // namespace hogsos
