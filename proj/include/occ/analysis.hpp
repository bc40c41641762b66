#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "occ/eval.hpp"
#include "occ/print.hpp"
#include "occ/runtime.hpp"
#include "occ/syntax.hpp"

namespace occ {

// Finite set of constants for every atom type.
class AtomDomain {
 public:
  AtomDomain() = default;
  explicit AtomDomain(std::size_t per_atom) : per_atom_(per_atom) {}

  void set(const std::string& atom, std::vector<std::string> constants);
  // Explicit list, or `per_atom` generated names: val_x, val_x' for an atom
  // ty_x, otherwise c0_atom, c1_atom, ...
  std::vector<std::string> constants(const std::string& atom) const;
  std::size_t per_atom() const { return per_atom_; }

 private:
  std::size_t per_atom_ = 2;
  std::map<std::string, std::vector<std::string>> explicit_;
};

// Every value of an atom/product type over the domain. Closure types have no
// enumeration and raise CombinatorialLimit.
std::vector<Value> enumerate_values(const Type& t, const AtomDomain& dom);
// Every valuation realising `ctx`, in lexicographic order.
std::vector<Valuation> enumerate_valuations(const Context& ctx, const AtomDomain& dom, std::size_t cap = 100000);

// Γ ⊢ v =_Φ0 v' : σ. Throws WitnessNotFound when either side is ill-typed.
bool value_equiv(const Context& ctx, const Value& v, const Value& w, const Type& sigma, const DepVector& phi0);

// V =_Φ0 V'. With `ctx`, closure values are compared by value_equiv, otherwise
// structurally.
bool phi_equiv_valuations(const Valuation& a, const Valuation& b, const DepVector& phi0,
                          const Context* ctx = nullptr);

struct Violation {
  Valuation left;
  Valuation right;
  Value left_value;
  Value right_value;
  std::string reason;
};

struct NonInterferenceReport {
  Term term;
  Context context;
  DepVector phi;
  Type type;
  std::size_t pairs_tested = 0;
  std::vector<Violation> violations;  // sorted

  bool holds() const { return violations.empty(); }
};

struct NonInterferenceOptions {
  std::size_t max_pairs = 100000;
  std::size_t max_steps = 1000000;
};

NonInterferenceReport check_noninterference(const Context& ctx, const Term& e, const AtomDomain& dom,
                                            const NonInterferenceOptions& options = {});

// Text: one header block, then one line per violation.
std::string report_text(const NonInterferenceReport& r, const PrintOptions& o = {});
// JSON object with one record per violation.
std::string report_json(const NonInterferenceReport& r);

// Names whose value alone can change the (atomic) classic result.
std::vector<std::string> semantic_deps_oracle(const Context& ctx, const Term& e, const AtomDomain& dom,
                                              std::size_t cap = 100000);

struct GenOptions {
  bool allow_fix = false;
  int max_retries = 200;
};

// A term typable in `ctx`. With `target`, its inferred type is alpha-equal to
// it. Throws GenerationExhausted.
Term gen_typed_term(const Context& ctx, const std::optional<Type>& target, int depth, std::uint64_t seed,
                    const GenOptions& options = {});

}  // namespace occ
