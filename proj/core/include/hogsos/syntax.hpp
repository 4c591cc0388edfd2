#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hogsos/types.hpp"

namespace hogsos {

/// A type scheme over operator type parameters: a parameter reference, unit,
/// or an arrow of schemes. Used by operator declarations and rule templates.
class TyExpr {
 public:
  static TyExpr param(int index);
  static TyExpr unit();
  static TyExpr arrow(TyExpr domain, TyExpr codomain);

  bool is_param() const { return node_->kind == Kind::Param; }
  bool is_unit() const { return node_->kind == Kind::Unit; }
  bool is_arrow() const { return node_->kind == Kind::Arrow; }
  int param_index() const { return node_->param; }
  TyExpr domain() const { return TyExpr(node_->dom); }
  TyExpr codomain() const { return TyExpr(node_->cod); }

  /// Substitute concrete types for the parameters.
  Ty instantiate(std::span<const Ty> params) const;

  /// One-sided matching: bind parameters so that this scheme equals `ground`.
  /// Bindings already present must agree. Returns false on mismatch.
  bool match(Ty ground, std::vector<std::optional<Ty>>& bindings) const;

 private:
  enum class Kind { Param, Unit, Arrow };
  struct Node {
    Kind kind;
    int param;
    std::shared_ptr<const Node> dom, cod;
  };
  explicit TyExpr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// Process-global operator symbol id. Interning operator names globally keeps
/// term identity consistent across signatures that share operators.
using OpId = int;

OpId intern_op_name(std::string_view name);
const std::string& op_name_of(OpId id);

/// One operator of a Ty-sorted signature. Slot and result types are schemes
/// over the operator's type parameters.
struct OperatorDecl {
  std::string name;
  int param_count = 0;
  std::vector<TyExpr> slots;
  TyExpr result = TyExpr::unit();
};

class Signature {
 public:
  OpId add(OperatorDecl decl);
  /// Throws TypeError if the operator is not declared in this signature.
  const OperatorDecl& op(OpId id) const;
  bool declares(OpId id) const { return decls_.count(id) > 0; }
  std::optional<OpId> find(std::string_view name) const;
  /// Declared operator ids in declaration order.
  const std::vector<OpId>& order() const { return order_; }

 private:
  std::unordered_map<OpId, OperatorDecl> decls_;
  std::vector<OpId> order_;
};

/// The xTCL signature: e, S, S', S'', K, K', I, app.
const Signature& xtcl_signature();

namespace xtcl {
// Operator ids within xtcl_signature(), assigned at startup.
extern OpId E, S, Sp, Spp, K, Kp, I, App;
}

/// An intrinsically typed closed term: an operator with concrete type
/// parameters applied to children. Construction validates the children
/// against the operator's slots and computes the term's type, so every
/// reachable Term is well-typed. Hash-consed; equality is pointer identity.
class Term {
 public:
  /// Throws TypeError if params/children do not fit `op`'s declaration.
  static Term make(const Signature& sig, OpId op, std::vector<Ty> params,
                   std::vector<Term> children);

  OpId op() const { return node_->op; }
  const std::string& op_name() const { return node_->name; }
  std::span<const Ty> params() const { return node_->params; }
  std::span<const Term> children() const { return node_->children; }
  Ty type() const { return node_->type; }

  /// Number of operator nodes.
  int size() const { return node_->size; }

  friend bool operator==(Term a, Term b) { return a.node_ == b.node_; }
  friend bool operator!=(Term a, Term b) { return a.node_ != b.node_; }

  /// Deterministic structural order (size, then operator id, then params,
  /// then children). Used for reproducible universe slices.
  static int compare(Term a, Term b);
  friend bool operator<(Term a, Term b) { return compare(a, b) < 0; }

  std::size_t hash() const { return std::hash<const void*>{}(node_); }

 private:
  struct Node {
    OpId op;
    std::string name;
    std::vector<Ty> params;
    std::vector<Term> children;
    Ty type;
    int size;
  };
  explicit Term(const Node* node) : node_(node) {}
  const Node* node_;
};

struct TermHash {
  std::size_t operator()(Term t) const { return t.hash(); }
};

namespace xtcl {
// Convenience constructors over the builtin signature. `app` infers its type
// parameters from the function child.
Term e();
Term s(Ty t1, Ty t2, Ty t3);
Term sp(Ty t1, Ty t2, Ty t3, Term arg);
Term spp(Ty t1, Ty t2, Ty t3, Term arg1, Term arg2);
Term k(Ty t1, Ty t2);
Term kp(Ty t1, Ty t2, Term arg);
Term i(Ty t);
Term app(Term fun, Term arg);
}  // namespace xtcl

/// All well-typed closed terms of `type` with size() <= size_bound whose
/// every type annotation has size <= type_bound, in deterministic order.
std::vector<Term> enumerate_terms(const Signature& sig, Ty type, int size_bound, int type_bound);

enum class ClosureStatus { closed, truncated };

/// A frozen, finite, per-type stand-in for the full set of closed terms.
/// Members added while closing under transitions are flagged.
class Universe {
 public:
  struct Slice {
    Ty type;
    std::vector<Term> members;
    std::unordered_map<Term, std::int32_t, TermHash> index;
    std::vector<bool> closure_added;
    ClosureStatus status = ClosureStatus::closed;
  };

  int size_bound = 0;
  int type_bound = 0;
  std::vector<Slice> slices;  // aligned with enumerate_types(type_bound)

  int slice_index(Ty type) const;  // -1 if out of range
  const Slice* slice(Ty type) const;
  bool contains(Term t) const;
  /// Index of t within its type's slice; throws TypeError if absent.
  std::int32_t member_index(Term t) const;
  std::size_t total_members() const;
  bool any_truncated() const;

  /// Appends t to its slice, flagged as closure-added. Returns true only
  /// when the term was newly added; out-of-range types are rejected.
  bool add_closure_member(Term t);
};

/// The per-type slices enumerate_terms gives; closure flags all false.
Universe enumerate_universe(const Signature& sig, int size_bound, int type_bound);

/// One-step obligations used to close a universe under transitions.
struct UniverseSemantics {
  /// Unlabelled reducts of t (several for nondeterministic laws).
  std::function<std::vector<Term>(Term)> step_targets;
  /// Whether t has a function-value behaviour.
  std::function<bool(Term)> has_fun_value;
  /// The labelled result of a function value applied to a label.
  std::function<Term(Term fun, Term label)> apply_label;
};

/// Adds reducts and labelled results (labels drawn from the universe) until
/// a fixed point or until `fuel` additions have been made. Types whose
/// obligations were cut short are marked truncated.
Universe close_universe(Universe u, const UniverseSemantics& sem, long fuel);

/// Textual term syntax over a signature. Builtins: `e`, `I[T]`, `K[T1,T2]`,
/// `S[T1,T2,T3]`, `K'[T1,T2](t)`, `S'[T1,T2,T3](t)`, `S''[T1,T2,T3](t,u)`,
/// `(app t u)`. Custom operators: `name[T,...](t,...)`.
Term parse_term(const Signature& sig, std::string_view text);
std::string to_string(Term t);

}  // namespace hogsos
