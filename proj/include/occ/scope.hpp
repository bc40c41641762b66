#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "occ/syntax.hpp"

namespace occ {

// Node of a derivation of Γ ⊢ or Γ ⊢ σ. Sub-derivations for the prefixes of
// a context are shared between nodes.
struct ScopeDerivation {
  std::string rule;  // Scope-Context-Nil, Scope-Context, Scope-Atom, ...
  Context context;
  std::optional<Type> type;  // empty for context judgments
  std::vector<std::shared_ptr<const ScopeDerivation>> premises;
};
using ScopeDerivationPtr = std::shared_ptr<const ScopeDerivation>;

ScopeDerivationPtr check_context(const Context& ctx);
ScopeDerivationPtr check_type(const Context& ctx, const Type& type);

// Boolean variants; never throw on scoping failures.
bool well_scoped(const Context& ctx);
bool well_scoped(const Context& ctx, const Type& type);

// Does `captured` occur literally as a prefix of `ambient` (names equal, types
// alpha-equal, same order)?
bool is_prefix_of(const Context& captured, const Context& ambient);

// Structural re-check of a derivation against the rule schemas.
bool check_scope_derivation(const ScopeDerivation& d);

}  // namespace occ
