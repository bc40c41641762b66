#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "occ/syntax.hpp"

namespace occ {

// Node of a derivation of
//   Γ, y:ρ, Δ ⊢ σ →[y\Ψ] Γ, Δ' ⊢ τ      (type judgment)
//   Γ, y:ρ, Δ →[y\Ψ] Γ, Δ'              (context judgment, no types)
struct SubstDerivation {
  std::string rule;  // Subst-Context-Nil, Subst-Context, Subst-Atom, ...
  Context gamma;     // Γ
  std::string var;   // y
  Type var_type;     // ρ
  DepVector psi;     // Ψ, over dom Γ
  Context delta;     // Δ
  Context delta_out; // Δ'
  std::optional<Type> input;
  std::optional<Type> output;
  std::vector<std::shared_ptr<const SubstDerivation>> premises;
};
using SubstDerivationPtr = std::shared_ptr<const SubstDerivation>;

struct ContextSubst {
  Context delta;
  SubstDerivationPtr derivation;
};

struct TypeSubst {
  Context delta;
  Type type;
  SubstDerivationPtr derivation;
};

struct AnnotatedSubst {
  AnnotatedContext context;
  Type type;
  SubstDerivationPtr derivation;  // null when nothing was substituted
};

ContextSubst subst_context(const Context& gamma, const std::string& y, const Type& rho, const Context& delta,
                           const DepVector& psi);

TypeSubst subst_type(const Context& gamma, const std::string& y, const Type& rho, const Context& delta,
                     const Type& sigma, const DepVector& psi);

// Γ^Φ1, y:ρ^χ, Δ^Φ2 ⊢ τ  ↦  Γ^(Φ1+χ·Ψ), Δ'^Φ2 ⊢ τ'
AnnotatedSubst subst_annotated(const AnnotatedContext& ctx, const std::string& y, const DepVector& psi,
                               const Type& tau);

struct SubstBinding {
  std::string name;
  Type type;
  Dep dep = Dep::Zero;
  DepVector psi;  // over the context preceding this binding
};

// ctx, x1:τ1^ψ1, ..., xn:τn^ψn ⊢ τ; substitutes xn first, x1 last.
AnnotatedSubst subst_sequence(const AnnotatedContext& ctx, const std::vector<SubstBinding>& bindings,
                              const Type& tau);

// Re-verifies every node against the rule schemas.
bool check_subst_derivation(const SubstDerivation& d);

}  // namespace occ
