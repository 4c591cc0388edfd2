#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace hogsos {

/// A simple type: unit or an arrow between two simple types.
///
/// Values are hash-consed, so copies are cheap and equality is pointer
/// identity. The size measure (number of unit leaves) is precomputed; it
/// drives both bounded enumeration and the ultrametric on predicates.
class Ty {
 public:
  static Ty unit();
  static Ty arrow(Ty domain, Ty codomain);

  bool is_unit() const { return node_->dom == nullptr; }
  bool is_arrow() const { return node_->dom != nullptr; }
  Ty domain() const;    // arrows only
  Ty codomain() const;  // arrows only

  /// size(unit) = 1, size(a -> b) = size(a) + size(b). Always >= 1.
  int size() const { return node_->size; }

  friend bool operator==(Ty a, Ty b) { return a.node_ == b.node_; }
  friend bool operator!=(Ty a, Ty b) { return a.node_ != b.node_; }

  /// Deterministic structural order: by size, then unit before arrow, then
  /// domain and codomain recursively. Independent of allocation order.
  static int compare(Ty a, Ty b);
  friend bool operator<(Ty a, Ty b) { return compare(a, b) < 0; }

  std::size_t hash() const { return std::hash<const void*>{}(node_); }

 private:
  struct Node {
    const Node* dom;  // null for unit
    const Node* cod;
    int size;
  };

  explicit Ty(const Node* node) : node_(node) {}
  const Node* node_;
};

struct TyHash {
  std::size_t operator()(Ty t) const { return t.hash(); }
};

/// All types of size <= max_size, ascending by size and then by the
/// structural order, so runs are reproducible.
std::vector<Ty> enumerate_types(int max_size);

/// `unit` or `(-> A B)`; `(-> A B C)` right-nests to `(-> A (-> B C))`.
Ty parse_type(std::string_view text);
std::string to_string(Ty t);

}  // namespace hogsos
