#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "occ/runtime.hpp"
#include "occ/syntax.hpp"

namespace occ {

// One w →[y\v] w' step recorded in a reduction derivation.
struct ValueSubstStep {
  std::string var;
  Value before;
  Value bound;
  Value after;
};

struct ReductionDerivation {
  std::string rule;  // Red-Var, Red-Lam, Red-Lam-Fix, Red-Pair, Red-Proj, Red-Let, Red-App, Red-App-Fix
  Valuation env;
  Term term;
  Value value;
  std::vector<std::shared_ptr<const ReductionDerivation>> premises;
  std::vector<ValueSubstStep> substitutions;
};
using ReductionDerivationPtr = std::shared_ptr<const ReductionDerivation>;

struct EvalOptions {
  // Typing context realised by the valuation. When present, captured values
  // carry witnesses (type and dependencies of their definition).
  std::optional<Context> typing;
  // Check the value-substitution lemma at every substitution step (needs
  // `typing`).
  bool self_check = false;
  std::size_t max_steps = 1000000;
  std::size_t max_depth = 4000;
  bool record_derivation = false;
};

struct SelfCheckReport {
  std::size_t checks = 0;            // substitution steps examined
  std::size_t premise_failures = 0;  // steps whose inputs were already ill-typed
  std::vector<std::string> failures; // steps whose output is ill-typed
  std::size_t typing_lost = 0;       // subterms evaluated without static information
};

struct EvalResult {
  Value value;
  ReductionDerivationPtr derivation;
  std::size_t steps = 0;
  SelfCheckReport self_check;
};

EvalResult eval_open(const Valuation& vals, const Term& e, const EvalOptions& options = {});

// ---------------------------------------------------------------------------
// Classic semantics
// ---------------------------------------------------------------------------

struct ClassicValueNode;

class ClassicValue {
 public:
  enum class Kind { Atom, Pair, Closure };
  struct Binding;

  ClassicValue() = default;
  static ClassicValue atom(std::string atom_type, std::string constant);
  static ClassicValue pair(ClassicValue a, ClassicValue b);
  static ClassicValue closure(std::vector<Binding> env, Term code);

  bool valid() const { return node_ != nullptr; }
  Kind kind() const;
  const std::string& atom_type() const;
  const std::string& constant() const;
  const ClassicValue& first() const;
  const ClassicValue& second() const;
  const std::vector<Binding>& env() const;
  const Term& code() const;
  const ClassicValueNode* node() const { return node_.get(); }

 private:
  explicit ClassicValue(std::shared_ptr<const ClassicValueNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const ClassicValueNode> node_;
};

struct ClassicValue::Binding {
  std::string name;
  ClassicValue value;
};

using ClassicEnv = std::vector<ClassicValue::Binding>;

struct ClassicValueNode {
  ClassicValue::Kind kind;
  std::string atom_type;
  std::string constant;
  ClassicValue first;
  ClassicValue second;
  ClassicEnv env;
  Term code;
};

struct ClassicDerivation {
  std::string rule;  // Classic-Red-*
  ClassicEnv env;
  Term term;
  ClassicValue value;
  std::vector<std::shared_ptr<const ClassicDerivation>> premises;
};
using ClassicDerivationPtr = std::shared_ptr<const ClassicDerivation>;

struct ClassicResult {
  ClassicValue value;
  ClassicDerivationPtr derivation;
  std::size_t steps = 0;
};

ClassicResult eval_classic(const ClassicEnv& env, const Term& e, const EvalOptions& options = {});

// Closures become (V_P, captured) environments.
ClassicEnv classic_env_of(const Valuation& vals);

// V ⊢ v = W ⊢c w. Closure environments are matched by name: the classic
// environment must appear, in order, within the open one.
bool values_equiv_semantics(const Valuation& vals, const Value& v, const ClassicEnv& env, const ClassicValue& w);
bool valuations_equiv_semantics(const Valuation& vals, const ClassicEnv& env);

// Schema validator for reduction derivations. Returns an empty string when
// every node is well-formed, otherwise a description of the first bad node.
std::string check_reduction_derivation(const ReductionDerivation& d);
std::string check_classic_derivation(const ClassicDerivation& d);

}  // namespace occ
