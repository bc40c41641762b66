#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "occ/subst.hpp"
#include "occ/syntax.hpp"
#include "occ/typing.hpp"

namespace occ {

struct ValueNode;

// Static information recorded when a value is captured: the type it had in
// the context preceding its binder, and the dependencies of its definition.
struct Witness {
  Type type;
  DepVector psi;
};

struct Captured;

class Value {
 public:
  enum class Kind { Atom, Pair, Closure };

  Value() = default;

  static Value atom(std::string atom_type, std::string constant);
  static Value pair(Value first, Value second);
  // `code` is a Lam or Fix term.
  static Value closure(std::vector<std::string> pending, std::vector<Captured> captured, Term code);

  bool valid() const { return node_ != nullptr; }
  Kind kind() const;
  bool is_atom() const { return kind() == Kind::Atom; }
  bool is_pair() const { return kind() == Kind::Pair; }
  bool is_closure() const { return kind() == Kind::Closure; }

  const std::string& atom_type() const;
  const std::string& constant() const;
  const Value& first() const;
  const Value& second() const;
  const std::vector<std::string>& pending() const;
  // Most recently captured first.
  const std::vector<Captured>& captured() const;
  const Term& code() const;

  const ValueNode* node() const { return node_.get(); }

 private:
  explicit Value(std::shared_ptr<const ValueNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const ValueNode> node_;
};

struct Captured {
  std::string name;
  Value value;
  std::optional<Witness> witness;
};

struct ValueNode {
  Value::Kind kind;
  std::string atom_type;
  std::string constant;
  Value first;
  Value second;
  std::vector<std::string> pending;
  std::vector<Captured> captured;
  Term code;
};

// Structural equality: atoms by constant, closures by pending list, captured
// values and alpha-equal code. Witnesses are ignored.
bool same_value(const Value& a, const Value& b);

// Ordered name -> value map; lookup returns the rightmost binding.
class Valuation {
 public:
  struct Entry {
    std::string name;
    Value value;
  };

  Valuation() = default;
  explicit Valuation(std::vector<Entry> entries) : entries_(std::move(entries)) {}

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const Entry& operator[](std::size_t i) const { return entries_[i]; }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  std::vector<std::string> names() const;
  const Value* find(std::string_view name) const;
  Valuation prefix(std::size_t n) const;
  Valuation extended(std::string name, Value v) const;
  void push_back(std::string name, Value v);

 private:
  std::vector<Entry> entries_;
};

// w →[y\v] w'. The witness, when given, is attached to every new capture.
Value subst_value(const Value& w, const std::string& y, const Value& v,
                  const std::optional<Witness>& witness = std::nullopt);

// Node of a derivation of Γ ⊢ v : σ.
struct ValueTypingDerivation {
  std::string rule;  // Value-Atom, Value-Product, Value-Closure, Value-Closure-Fix
  Context context;
  Value value;
  Type type;
  std::vector<std::shared_ptr<const ValueTypingDerivation>> premises;  // captured values
  // Closures: the chosen internal annotations.
  std::vector<Type> captured_types;
  std::vector<DepVector> captured_psi;
  TypingDerivationPtr body;  // typing of the code in Γ, (x_i : τ_i)
  std::vector<SubstDerivationPtr> substitutions;  // x_n first
  bool witnesses_recorded = true;
};
using ValueTypingDerivationPtr = std::shared_ptr<const ValueTypingDerivation>;

struct ValueCheckOptions {
  // Upper bound on the total number of enumerated annotation bits when no
  // witnesses were recorded.
  std::size_t max_search_bits = 16;
};

// Throws ValueTypeMismatch (or WitnessNotFound when the search is cut off).
ValueTypingDerivationPtr check_value(const Context& ctx, const Value& v, const Type& sigma,
                                     const ValueCheckOptions& options = {});

bool value_has_type(const Context& ctx, const Value& v, const Type& sigma);

// V : Γ ⊢. On failure `diagnostic` (if given) receives the reason.
bool check_valuation(const Valuation& vals, const Context& ctx, std::string* diagnostic = nullptr);

}  // namespace occ
