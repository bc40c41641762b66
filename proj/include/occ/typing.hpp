#pragma once

#include <memory>
#include <string>
#include <vector>

#include "occ/subst.hpp"
#include "occ/syntax.hpp"

namespace occ {

// Node of a derivation of Γ^Φ ⊢ e : σ.
struct TypingDerivation {
  std::string rule;  // Var, Product, Proj, Lam, Fix, Let, App
  Context context;
  DepVector phi;
  Term term;
  Type type;
  std::vector<std::shared_ptr<const TypingDerivation>> premises;
  SubstDerivationPtr subst;  // Let, App

  // Fix: the annotations found by iteration.
  DepVector fix_psi;
  Dep fix_param_dep = Dep::Zero;
  Dep fix_chi = Dep::Zero;

  // App: the parameter name used in Γ0, Γ1, x:σ and the result type re-scoped
  // into that context.
  std::string app_param;
  Type app_result;
};
using TypingDerivationPtr = std::shared_ptr<const TypingDerivation>;

struct InferOptions {
  // Re-scope closure types in annotations (and in function types at
  // application sites) into the current context with weaken_to. Used when
  // re-typing closure bodies in a larger dynamic context.
  bool weaken_annotations = false;
  bool check_context = true;
};

struct InferResult {
  DepVector phi;
  Type type;
  TypingDerivationPtr derivation;
};

InferResult infer(const Context& ctx, const Term& e, const InferOptions& options = {});

struct DerivationCheck {
  bool ok = true;
  std::string message;
  std::vector<std::string> path;
};

// Verifies every node against its rule schema, without re-running inference.
DerivationCheck check_derivation(const TypingDerivation& d);

}  // namespace occ
