#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "occ/error.hpp"

namespace occ {

// ---------------------------------------------------------------------------
// Dependency annotations
// ---------------------------------------------------------------------------

enum class Dep : std::uint8_t { Zero = 0, One = 1 };

constexpr Dep dep_or(Dep a, Dep b) {
  return (a == Dep::One || b == Dep::One) ? Dep::One : Dep::Zero;
}
constexpr Dep dep_and(Dep a, Dep b) {
  return (a == Dep::One && b == Dep::One) ? Dep::One : Dep::Zero;
}
constexpr int to_int(Dep d) { return d == Dep::One ? 1 : 0; }
constexpr Dep dep_of(bool b) { return b ? Dep::One : Dep::Zero; }

class Context;

// Ordered map from the domain of a context to dependency flags.
class DepVector {
 public:
  struct Entry {
    std::string name;
    Dep dep = Dep::Zero;
    bool operator==(const Entry&) const = default;
  };

  DepVector() = default;
  explicit DepVector(std::vector<Entry> entries);

  static DepVector zeros(const Context& ctx);
  static DepVector zeros(const std::vector<std::string>& names);
  static DepVector unit(const Context& ctx, std::string_view name);

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::vector<Entry>& entries() const { return entries_; }
  const Entry& operator[](std::size_t i) const { return entries_[i]; }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  std::vector<std::string> domain() const;
  bool has(std::string_view name) const;
  // Missing names read as zero.
  Dep get(std::string_view name) const;
  Dep at(std::string_view name) const;  // throws on missing name
  void set(std::string_view name, Dep dep);
  void push_back(std::string name, Dep dep);

  DepVector prefix(std::size_t n) const;
  // Re-indexes over `ctx`, reading names this vector lacks as zero. Every
  // name of this vector must occur in `ctx`.
  DepVector zero_extend(const Context& ctx) const;
  DepVector zero_extend(const std::vector<std::string>& names) const;

  bool all_zero() const;
  // Pointwise implication: every 1 here is a 1 in `other` (missing = 0).
  bool subset_of(const DepVector& other) const;
  bool same_domain(const DepVector& other) const;

  bool operator==(const DepVector&) const = default;

 private:
  std::vector<Entry> entries_;
};

DepVector dep_sum(const DepVector& a, const DepVector& b);
DepVector dep_scale(Dep phi, const DepVector& v);

// ---------------------------------------------------------------------------
// Types and contexts
// ---------------------------------------------------------------------------

struct TypeNode;
struct ClosureData;

class Type {
 public:
  enum class Kind { Atom, Product, Closure };

  Type() = default;

  static Type atom(std::string name);
  static Type product(Type left, Type right);
  static Type closure(ClosureData data);

  bool valid() const { return node_ != nullptr; }
  Kind kind() const;
  bool is_atom() const { return kind() == Kind::Atom; }
  bool is_product() const { return kind() == Kind::Product; }
  bool is_closure() const { return kind() == Kind::Closure; }

  const std::string& atom_name() const;
  const Type& left() const;
  const Type& right() const;
  const ClosureData& closure() const;

  const TypeNode* node() const { return node_.get(); }

 private:
  explicit Type(std::shared_ptr<const TypeNode> node) : node_(std::move(node)) {}
  std::shared_ptr<const TypeNode> node_;
};

struct Binding {
  std::string name;
  Type type;
};

// A telescope: each type may mention only the names bound before it.
class Context {
 public:
  Context() = default;
  explicit Context(std::vector<Binding> entries) : entries_(std::move(entries)) {}

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const Binding& operator[](std::size_t i) const { return entries_[i]; }
  const std::vector<Binding>& entries() const { return entries_; }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  std::vector<std::string> names() const;
  // Index of the rightmost binding of `name`.
  std::optional<std::size_t> find(std::string_view name) const;
  bool contains(std::string_view name) const { return find(name).has_value(); }
  const Type& type_of(std::string_view name) const;

  Context prefix(std::size_t n) const;
  Context suffix(std::size_t from) const;
  Context extended(std::string name, Type type) const;
  Context concat(const Context& tail) const;
  void push_back(std::string name, Type type);

 private:
  std::vector<Binding> entries_;
};

// Γ^Φ: a context together with one dependency flag per binding.
struct AnnotatedContext {
  Context context;
  DepVector deps;

  AnnotatedContext() = default;
  AnnotatedContext(Context ctx, DepVector d);

  std::size_t size() const { return context.size(); }
  bool empty() const { return context.empty(); }
  std::vector<std::string> names() const { return context.names(); }
};

struct ClosureData {
  AnnotatedContext captured;
  std::string param;
  Dep param_dep = Dep::Zero;
  Type param_type;
  Type result;
};

struct TypeNode {
  Type::Kind kind;
  std::string atom;
  Type left;
  Type right;
  std::shared_ptr<const ClosureData> closure;
};

// Equality up to renaming of closure-parameter binders. Names in captured
// contexts that are not bound by an enclosing closure parameter are compared
// literally.
bool alpha_equal(const Type& a, const Type& b);
bool alpha_equal(const Context& a, const Context& b);
bool alpha_equal(const AnnotatedContext& a, const AnnotatedContext& b);

// Renames free occurrences of `from` (in captured contexts) to `to`.
Type rename_free(const Type& t, std::string_view from, std::string_view to);

// Alpha-renames the parameter of a closure type.
Type rename_param(const Type& closure_type, std::string new_param);

// Re-scopes `t` into `ambient`. Every captured context of `t` must list its
// names in `ambient` order; it is replaced by the full prefix of `ambient` up
// to its last name, with the inserted bindings annotated 0. Identity on types
// that are already well-scoped in `ambient`.
Type weaken_to(const Context& ambient, const Type& t);

// Does the name occur in some captured context of `t`?
bool mentions(const Type& t, std::string_view name);

// ---------------------------------------------------------------------------
// Terms
// ---------------------------------------------------------------------------

struct TermNode;

class Term {
 public:
  enum class Kind { Var, Pair, Proj, Lam, Fix, App, Let };

  Term() = default;

  static Term var(std::string name, SourceLocation loc = {});
  static Term pair(Term first, Term second, SourceLocation loc = {});
  static Term proj(int index, Term of, SourceLocation loc = {});
  static Term lam(std::string param, Type param_type, Term body, SourceLocation loc = {});
  static Term fix(std::string fname, std::string param, Type param_type, Type result_type, Term body,
                  SourceLocation loc = {});
  static Term app(Term fn, Term arg, SourceLocation loc = {});
  static Term let(std::string name, Term def, Term body, SourceLocation loc = {});

  bool valid() const { return node_ != nullptr; }
  Kind kind() const;
  const SourceLocation& loc() const;

  // Var: the variable. Let: the bound name. Lam/Fix: the parameter.
  const std::string& name() const;
  const std::string& fname() const;     // Fix
  int index() const;                    // Proj
  const Type& param_type() const;       // Lam, Fix
  const Type& result_type() const;      // Fix
  const Term& first() const;            // Pair, App (function), Let (definition), Proj
  const Term& second() const;           // Pair, App (argument), Let (body)
  const Term& body() const;             // Lam, Fix

  const TermNode* node() const { return node_.get(); }

 private:
  explicit Term(std::shared_ptr<const TermNode> node) : node_(std::move(node)) {}
  std::shared_ptr<const TermNode> node_;
};

struct TermNode {
  Term::Kind kind;
  std::string name;
  std::string fname;
  int index = 0;
  Type param_type;
  Type result_type;
  Term first;
  Term second;
  SourceLocation loc;
};

bool alpha_equal(const Term& a, const Term& b);

std::string_view term_kind_name(Term::Kind kind);

// Free variables in order of first occurrence, including names referenced
// from captured contexts of type annotations.
std::vector<std::string> free_variables(const Term& t);

// Number of term nodes.
std::size_t term_size(const Term& t);

// ---------------------------------------------------------------------------
// Names
// ---------------------------------------------------------------------------

// A name that has never been handed out before. Fresh names keep the base
// name and add a `'N` suffix, so they remain valid source identifiers.
std::string fresh_name(std::string_view base);
std::string_view base_name(std::string_view name);

}  // namespace occ
