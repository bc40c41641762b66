#include "occ/scope.hpp"

#include <unordered_set>

namespace occ {

namespace {

// Derivations of Γ[0..i) ⊢ for every i, built incrementally.
struct Chain {
  Context ctx;
  std::vector<ScopeDerivationPtr> prefixes;  // size ctx.size() + 1
};

ScopeDerivationPtr type_derivation(const Chain& chain, const Type& t);

Chain nil_chain() {
  auto d = std::make_shared<ScopeDerivation>();
  d->rule = "Scope-Context-Nil";
  return Chain{Context{}, {d}};
}

void extend_chain(Chain& chain, const std::string& name, const Type& t) {
  if (chain.ctx.contains(name)) {
    throw Error(ErrorKind::IllScoped, "variable " + name + " is bound twice in the context").with_subject(name);
  }
  ScopeDerivationPtr premise;
  try {
    premise = type_derivation(chain, t);
  } catch (Error& e) {
    e.push_path("Scope-Context(" + name + ")");
    throw;
  }
  chain.ctx.push_back(name, t);
  auto d = std::make_shared<ScopeDerivation>();
  d->rule = "Scope-Context";
  d->context = chain.ctx;
  d->premises = {premise};
  chain.prefixes.push_back(d);
}

Chain chain_for(const Context& ctx) {
  Chain chain = nil_chain();
  for (const auto& b : ctx) extend_chain(chain, b.name, b.type);
  return chain;
}

Chain chain_prefix(const Chain& chain, std::size_t n) {
  Chain out;
  out.ctx = chain.ctx.prefix(n);
  out.prefixes.assign(chain.prefixes.begin(), chain.prefixes.begin() + static_cast<std::ptrdiff_t>(n + 1));
  return out;
}

std::string names_of(const Context& c) {
  std::string s = "[";
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i) s += ",";
    s += c[i].name;
  }
  return s + "]";
}

ScopeDerivationPtr type_derivation(const Chain& chain, const Type& t) {
  auto d = std::make_shared<ScopeDerivation>();
  d->context = chain.ctx;
  d->type = t;
  switch (t.kind()) {
    case Type::Kind::Atom:
      d->rule = "Scope-Atom";
      d->premises = {chain.prefixes.back()};
      return d;
    case Type::Kind::Product:
      d->rule = "Scope-Product";
      d->premises = {type_derivation(chain, t.left()), type_derivation(chain, t.right())};
      return d;
    case Type::Kind::Closure: {
      d->rule = "Scope-Closure";
      const ClosureData& c = t.closure();
      const Context& captured = c.captured.context;
      for (std::size_t i = 0; i < captured.size(); ++i) {
        const std::string& n = captured[i].name;
        if (!chain.ctx.contains(n)) {
          throw Error(ErrorKind::IllScoped, "closure type captures " + n + ", which is not bound in the context " +
                                                names_of(chain.ctx))
              .with_subject(n);
        }
        if (i >= chain.ctx.size() || chain.ctx[i].name != n) {
          throw Error(ErrorKind::NotPrefix, "captured context " + names_of(captured) +
                                                " is not a prefix of the context " + names_of(chain.ctx))
              .with_subject(n);
        }
        if (!alpha_equal(chain.ctx[i].type, captured[i].type)) {
          throw Error(ErrorKind::NotPrefix,
                      "captured context gives " + n + " a different type than the ambient context")
              .with_subject(n);
        }
      }
      Chain inner = chain_prefix(chain, captured.size());
      if (inner.ctx.contains(c.param)) {
        throw Error(ErrorKind::IllScoped, "closure parameter " + c.param + " shadows a captured variable")
            .with_subject(c.param);
      }
      ScopeDerivationPtr param;
      try {
        param = type_derivation(inner, c.param_type);
      } catch (Error& e) {
        e.push_path("Scope-Closure(param " + c.param + ")");
        throw;
      }
      inner.ctx.push_back(c.param, c.param_type);
      auto ext = std::make_shared<ScopeDerivation>();
      ext->rule = "Scope-Context";
      ext->context = inner.ctx;
      ext->premises = {param};
      inner.prefixes.push_back(ext);
      ScopeDerivationPtr result;
      try {
        result = type_derivation(inner, c.result);
      } catch (Error& e) {
        e.push_path("Scope-Closure(result)");
        throw;
      }
      d->premises = {chain.prefixes.back(), param, result};
      return d;
    }
  }
  return d;
}

bool same_context(const Context& a, const Context& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].name != b[i].name || !alpha_equal(a[i].type, b[i].type)) return false;
  }
  return true;
}

bool valid_node(const ScopeDerivation& d) {
  const auto& p = d.premises;
  for (const auto& q : p) {
    if (!q) return false;
  }
  if (d.rule == "Scope-Context-Nil") return !d.type && d.context.empty() && p.empty();
  if (d.rule == "Scope-Context") {
    if (d.type || d.context.empty() || p.size() != 1 || !p[0]->type) return false;
    const auto& last = d.context[d.context.size() - 1];
    return same_context(p[0]->context, d.context.prefix(d.context.size() - 1)) &&
           alpha_equal(*p[0]->type, last.type);
  }
  if (!d.type) return false;
  const Type& t = *d.type;
  if (d.rule == "Scope-Atom") {
    return t.is_atom() && p.size() == 1 && !p[0]->type && same_context(p[0]->context, d.context);
  }
  if (d.rule == "Scope-Product") {
    return t.is_product() && p.size() == 2 && p[0]->type && p[1]->type &&
           same_context(p[0]->context, d.context) && same_context(p[1]->context, d.context) &&
           alpha_equal(*p[0]->type, t.left()) && alpha_equal(*p[1]->type, t.right());
  }
  if (d.rule == "Scope-Closure") {
    if (!t.is_closure() || p.size() != 3) return false;
    const ClosureData& c = t.closure();
    const Context& g0 = c.captured.context;
    return !p[0]->type && same_context(p[0]->context, d.context) && is_prefix_of(g0, d.context) &&
           p[1]->type && same_context(p[1]->context, g0) && alpha_equal(*p[1]->type, c.param_type) &&
           p[2]->type && same_context(p[2]->context, g0.extended(c.param, c.param_type)) &&
           alpha_equal(*p[2]->type, c.result);
  }
  return false;
}

}  // namespace

ScopeDerivationPtr check_context(const Context& ctx) { return chain_for(ctx).prefixes.back(); }

ScopeDerivationPtr check_type(const Context& ctx, const Type& type) {
  Chain chain = chain_for(ctx);
  return type_derivation(chain, type);
}

bool well_scoped(const Context& ctx) {
  try {
    check_context(ctx);
    return true;
  } catch (const Error&) {
    return false;
  }
}

bool well_scoped(const Context& ctx, const Type& type) {
  try {
    check_type(ctx, type);
    return true;
  } catch (const Error&) {
    return false;
  }
}

bool is_prefix_of(const Context& captured, const Context& ambient) {
  if (captured.size() > ambient.size()) return false;
  for (std::size_t i = 0; i < captured.size(); ++i) {
    if (captured[i].name != ambient[i].name) return false;
    if (!alpha_equal(captured[i].type, ambient[i].type)) return false;
  }
  return true;
}

bool check_scope_derivation(const ScopeDerivation& d) {
  std::unordered_set<const ScopeDerivation*> seen;
  std::vector<const ScopeDerivation*> todo{&d};
  while (!todo.empty()) {
    const ScopeDerivation* n = todo.back();
    todo.pop_back();
    if (!seen.insert(n).second) continue;
    if (!valid_node(*n)) return false;
    for (const auto& p : n->premises) todo.push_back(p.get());
  }
  return true;
}

}  // namespace occ
