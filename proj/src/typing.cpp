#include "occ/typing.hpp"

#include <unordered_set>

#include "occ/scope.hpp"

namespace occ {

namespace {

using Node = std::shared_ptr<TypingDerivation>;

Node make_node(std::string rule, const Context& ctx, const Term& e) {
  auto d = std::make_shared<TypingDerivation>();
  d->rule = std::move(rule);
  d->context = ctx;
  d->term = e;
  return d;
}

DepVector restrict_to(const DepVector& v, std::size_t n) { return v.prefix(n); }

class Inferencer {
 public:
  explicit Inferencer(const InferOptions& o) : opts_(o) {}

  TypingDerivationPtr run(const Context& ctx, const Term& e) {
    try {
      return step(ctx, e);
    } catch (Error& err) {
      err.set_location_if_unknown(e.loc());
      throw;
    }
  }

 private:
  // Runs a premise and labels failures with the rule that asked for it.
  TypingDerivationPtr premise(const Context& ctx, const Term& e, const std::string& label) {
    try {
      return step(ctx, e);
    } catch (Error& err) {
      err.set_location_if_unknown(e.loc());
      err.push_path(label);
      throw;
    }
  }

  Type annotation(const Context& ctx, const Type& t) const {
    return opts_.weaken_annotations ? weaken_to(ctx, t) : t;
  }

  void binder_fresh(const Context& ctx, const std::string& name) const {
    if (ctx.contains(name)) {
      throw Error(ErrorKind::IllScoped, "binder " + name + " shadows a variable of the context").with_subject(name);
    }
  }

  TypingDerivationPtr step(const Context& ctx, const Term& e) {
    switch (e.kind()) {
      case Term::Kind::Var: return var(ctx, e);
      case Term::Kind::Pair: return pair(ctx, e);
      case Term::Kind::Proj: return proj(ctx, e);
      case Term::Kind::Lam: return lam(ctx, e);
      case Term::Kind::Fix: return fix(ctx, e);
      case Term::Kind::Let: return let(ctx, e);
      case Term::Kind::App: return app(ctx, e);
    }
    internal_error("unknown term kind");
  }

  TypingDerivationPtr var(const Context& ctx, const Term& e) {
    if (!ctx.contains(e.name())) {
      throw Error(ErrorKind::UnboundVariable, "unbound variable " + e.name(), e.loc()).with_subject(e.name());
    }
    auto d = make_node("Var", ctx, e);
    d->phi = DepVector::unit(ctx, e.name());
    d->type = ctx.type_of(e.name());
    return d;
  }

  TypingDerivationPtr pair(const Context& ctx, const Term& e) {
    auto p1 = premise(ctx, e.first(), "Product(left)");
    auto p2 = premise(ctx, e.second(), "Product(right)");
    auto d = make_node("Product", ctx, e);
    d->phi = dep_sum(p1->phi, p2->phi);
    d->type = Type::product(p1->type, p2->type);
    d->premises = {p1, p2};
    return d;
  }

  TypingDerivationPtr proj(const Context& ctx, const Term& e) {
    auto p = premise(ctx, e.first(), "Proj");
    if (!p->type.is_product()) {
      throw Error(ErrorKind::TypeMismatch, "projection expects a product type", e.loc());
    }
    auto d = make_node("Proj", ctx, e);
    d->phi = p->phi;
    d->type = e.index() == 1 ? p->type.left() : p->type.right();
    d->premises = {p};
    return d;
  }

  TypingDerivationPtr lam(const Context& ctx, const Term& e) {
    binder_fresh(ctx, e.name());
    Type sigma = annotation(ctx, e.param_type());
    scoped(ctx, sigma, e, "Lam(param type)");
    Context inner = ctx.extended(e.name(), sigma);
    auto body = premise(inner, e.body(), "Lam(body)");
    ClosureData c;
    c.captured = AnnotatedContext(ctx, restrict_to(body->phi, ctx.size()));
    c.param = e.name();
    c.param_dep = body->phi[ctx.size()].dep;
    c.param_type = sigma;
    c.result = body->type;
    auto d = make_node("Lam", ctx, e);
    d->phi = DepVector::zeros(ctx);
    d->type = Type::closure(std::move(c));
    d->premises = {body};
    return d;
  }

  static Type fix_type(const Context& ctx, const DepVector& psi, const std::string& x, Dep phi, const Type& sigma,
                       const Type& tau) {
    ClosureData c;
    c.captured = AnnotatedContext(ctx, psi);
    c.param = x;
    c.param_dep = phi;
    c.param_type = sigma;
    c.result = tau;
    return Type::closure(std::move(c));
  }

  TypingDerivationPtr fix(const Context& ctx, const Term& e) {
    binder_fresh(ctx, e.fname());
    binder_fresh(ctx, e.name());
    if (e.fname() == e.name()) {
      throw Error(ErrorKind::IllScoped, "fix binds " + e.name() + " twice", e.loc()).with_subject(e.name());
    }
    Type sigma = annotation(ctx, e.param_type());
    Type tau = annotation(ctx.extended(e.name(), sigma), e.result_type());
    DepVector psi = DepVector::zeros(ctx);
    Dep phi = Dep::Zero;
    scoped(ctx, fix_type(ctx, psi, e.name(), phi, sigma, tau), e, "Fix(type)");

    // Monotone iteration from all-zero; each round can only add 1s.
    TypingDerivationPtr body;
    Type ft;
    for (std::size_t round = 0; round <= ctx.size() + 1; ++round) {
      ft = fix_type(ctx, psi, e.name(), phi, sigma, tau);
      Context inner = ctx.extended(e.fname(), ft).extended(e.name(), sigma);
      body = premise(inner, e.body(), "Fix(body)");
      DepVector next = dep_sum(psi, restrict_to(body->phi, ctx.size()));
      Dep next_phi = dep_or(phi, body->phi[ctx.size() + 1].dep);
      if (next == psi && next_phi == phi) break;
      psi = std::move(next);
      phi = next_phi;
    }
    if (!(restrict_to(body->phi, ctx.size()) == psi) || body->phi[ctx.size() + 1].dep != phi) {
      internal_error("fix annotation iteration did not stabilise");
    }
    if (!alpha_equal(body->type, tau)) {
      throw Error(ErrorKind::TypeMismatch, "body of fix " + e.fname() + " does not have its declared result type",
                  e.loc());
    }
    auto d = make_node("Fix", ctx, e);
    d->phi = DepVector::zeros(ctx);
    d->type = ft;
    d->premises = {body};
    d->fix_psi = psi;
    d->fix_param_dep = phi;
    d->fix_chi = body->phi[ctx.size()].dep;
    return d;
  }

  TypingDerivationPtr let(const Context& ctx, const Term& e) {
    binder_fresh(ctx, e.name());
    auto def = premise(ctx, e.first(), "Let(definition)");
    Context inner = ctx.extended(e.name(), def->type);
    auto body = premise(inner, e.second(), "Let(body)");
    AnnotatedSubst s;
    try {
      s = subst_annotated(AnnotatedContext(inner, body->phi), e.name(), def->phi, body->type);
    } catch (Error& err) {
      err.set_location_if_unknown(e.loc());
      err.push_path("Let(substitution of " + e.name() + ")");
      throw;
    }
    auto d = make_node("Let", ctx, e);
    d->phi = s.context.deps;
    d->type = s.type;
    d->premises = {def, body};
    d->subst = s.derivation;
    return d;
  }

  TypingDerivationPtr app(const Context& ctx, const Term& e) {
    auto fun = premise(ctx, e.first(), "App(function)");
    auto arg = premise(ctx, e.second(), "App(argument)");
    Type ft = fun->type;
    if (!ft.is_closure()) {
      throw Error(ErrorKind::NotAFunction, "applied term does not have a closure type", e.loc());
    }
    if (opts_.weaken_annotations) ft = weaken_to(ctx, ft);
    const ClosureData& c = ft.closure();
    if (!is_prefix_of(c.captured.context, ctx)) {
      throw Error(ErrorKind::PrefixError, "the context captured by the function type is not a prefix of the context",
                  e.loc());
    }
    if (!alpha_equal(arg->type, c.param_type)) {
      throw Error(ErrorKind::TypeMismatch, "argument type does not match the parameter type of the function",
                  e.loc());
    }
    std::string x = c.param;
    Type tau = c.result;
    if (ctx.contains(x)) {
      std::string fresh = fresh_name(x);
      tau = rename_free(tau, x, fresh);
      x = fresh;
    }
    Context ext = ctx.extended(x, c.param_type);
    Type weakened = weaken_to(ext, tau);
    TypeSubst s;
    try {
      s = subst_type(ctx, x, c.param_type, Context{}, weakened, arg->phi);
    } catch (Error& err) {
      err.set_location_if_unknown(e.loc());
      err.push_path("App(substitution of parameter " + x + ")");
      throw;
    }
    auto d = make_node("App", ctx, e);
    d->phi = dep_sum(dep_sum(fun->phi, c.captured.deps.zero_extend(ctx)), dep_scale(c.param_dep, arg->phi));
    d->type = s.type;
    d->premises = {fun, arg};
    d->subst = s.derivation;
    d->app_param = x;
    d->app_result = weakened;
    return d;
  }

  void scoped(const Context& ctx, const Type& t, const Term& e, const std::string& label) {
    try {
      check_type(ctx, t);
    } catch (Error& err) {
      err.set_location_if_unknown(e.loc());
      err.push_path(label);
      throw;
    }
  }

  InferOptions opts_;
};

// ---------------------------------------------------------------------------
// Derivation checking
// ---------------------------------------------------------------------------

bool same_context(const Context& a, const Context& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].name != b[i].name || !alpha_equal(a[i].type, b[i].type)) return false;
  }
  return true;
}

std::string check_node(const TypingDerivation& d) {
  const auto& p = d.premises;
  for (const auto& q : p) {
    if (!q) return "missing premise";
  }
  if (!d.phi.same_domain(DepVector::zeros(d.context))) return "annotation domain differs from the context";
  if (!d.term.valid() || !d.type.valid()) return "incomplete conclusion";
  const Term& e = d.term;
  const Context& ctx = d.context;
  auto premise_is = [&](std::size_t i, const Context& c, const Term& t) {
    return i < p.size() && same_context(p[i]->context, c) && p[i]->term.node() == t.node();
  };

  if (d.rule == "Var") {
    if (e.kind() != Term::Kind::Var || !p.empty()) return "Var: wrong shape";
    if (!ctx.contains(e.name())) return "Var: unbound variable";
    if (!(d.phi == DepVector::unit(ctx, e.name()))) return "Var: annotation is not the unit vector";
    if (!alpha_equal(d.type, ctx.type_of(e.name()))) return "Var: type differs from the context";
    return {};
  }
  if (d.rule == "Product") {
    if (e.kind() != Term::Kind::Pair || p.size() != 2) return "Product: wrong shape";
    if (!premise_is(0, ctx, e.first()) || !premise_is(1, ctx, e.second())) return "Product: premise order";
    if (!(d.phi == dep_sum(p[0]->phi, p[1]->phi))) return "Product: annotation is not the sum";
    if (!d.type.is_product() || !alpha_equal(d.type.left(), p[0]->type) || !alpha_equal(d.type.right(), p[1]->type))
      return "Product: type";
    return {};
  }
  if (d.rule == "Proj") {
    if (e.kind() != Term::Kind::Proj || p.size() != 1 || !premise_is(0, ctx, e.first())) return "Proj: wrong shape";
    if (!(d.phi == p[0]->phi)) return "Proj: annotation";
    if (!p[0]->type.is_product()) return "Proj: premise is not a product";
    const Type& comp = e.index() == 1 ? p[0]->type.left() : p[0]->type.right();
    if (!alpha_equal(comp, d.type)) return "Proj: type";
    return {};
  }
  if (d.rule == "Lam") {
    if (e.kind() != Term::Kind::Lam || p.size() != 1 || !d.type.is_closure()) return "Lam: wrong shape";
    const ClosureData& c = d.type.closure();
    Context inner = ctx.extended(e.name(), c.param_type);
    if (!premise_is(0, inner, e.body())) return "Lam: premise context";
    if (!d.phi.all_zero()) return "Lam: annotation must be zero";
    if (!same_context(c.captured.context, ctx)) return "Lam: captured context";
    if (!(c.captured.deps == p[0]->phi.prefix(ctx.size()))) return "Lam: captured annotation";
    if (c.param != e.name() || c.param_dep != p[0]->phi[ctx.size()].dep) return "Lam: parameter annotation";
    if (!alpha_equal(c.result, p[0]->type)) return "Lam: result type";
    return {};
  }
  if (d.rule == "Fix") {
    if (e.kind() != Term::Kind::Fix || p.size() != 1 || !d.type.is_closure()) return "Fix: wrong shape";
    const ClosureData& c = d.type.closure();
    Context inner = ctx.extended(e.fname(), d.type).extended(e.name(), c.param_type);
    if (!premise_is(0, inner, e.body())) return "Fix: premise context";
    if (!d.phi.all_zero()) return "Fix: annotation must be zero";
    if (!same_context(c.captured.context, ctx)) return "Fix: captured context";
    if (!(c.captured.deps == p[0]->phi.prefix(ctx.size()))) return "Fix: captured annotation is not a fixpoint";
    if (c.param != e.name() || c.param_dep != p[0]->phi[ctx.size() + 1].dep) return "Fix: parameter annotation";
    if (d.fix_chi != p[0]->phi[ctx.size()].dep) return "Fix: annotation of the recursive binder";
    if (!alpha_equal(c.result, p[0]->type)) return "Fix: result type";
    return {};
  }
  if (d.rule == "Let") {
    if (e.kind() != Term::Kind::Let || p.size() != 2 || !d.subst) return "Let: wrong shape";
    if (!premise_is(0, ctx, e.first())) return "Let: definition premise";
    if (!premise_is(1, ctx.extended(e.name(), p[0]->type), e.second())) return "Let: body premise";
    const Dep phi = p[1]->phi[ctx.size()].dep;
    if (!(d.phi == dep_sum(dep_scale(phi, p[0]->phi), p[1]->phi.prefix(ctx.size())))) return "Let: annotation";
    const SubstDerivation& s = *d.subst;
    if (s.var != e.name() || !same_context(s.gamma, ctx) || !(s.psi == p[0]->phi) || !s.delta.empty())
      return "Let: substitution premise";
    if (!s.input || !s.output || !alpha_equal(*s.input, p[1]->type) || !alpha_equal(*s.output, d.type))
      return "Let: substituted type";
    if (!check_subst_derivation(s)) return "Let: invalid substitution derivation";
    return {};
  }
  if (d.rule == "App") {
    if (e.kind() != Term::Kind::App || p.size() != 2 || !d.subst) return "App: wrong shape";
    if (!premise_is(0, ctx, e.first()) || !premise_is(1, ctx, e.second())) return "App: premise order";
    if (!p[0]->type.is_closure()) return "App: function premise is not a closure";
    const ClosureData& c0 = p[0]->type.closure();
    Type ft = is_prefix_of(c0.captured.context, ctx) ? p[0]->type : weaken_to(ctx, p[0]->type);
    const ClosureData& c = ft.closure();
    if (!is_prefix_of(c.captured.context, ctx)) return "App: captured context is not a prefix";
    if (!alpha_equal(c.param_type, p[1]->type)) return "App: argument type";
    Dep phi = c.param_dep;
    if (!(d.phi == dep_sum(dep_sum(p[0]->phi, c.captured.deps.zero_extend(ctx)), dep_scale(phi, p[1]->phi))))
      return "App: annotation";
    const SubstDerivation& s = *d.subst;
    if (s.var != d.app_param || ctx.contains(d.app_param) || !same_context(s.gamma, ctx) || !(s.psi == p[1]->phi))
      return "App: substitution premise";
    Type expected = weaken_to(ctx.extended(d.app_param, c.param_type), rename_free(c.result, c.param, d.app_param));
    if (!s.input || !s.output || !alpha_equal(*s.input, expected) || !alpha_equal(*s.output, d.type))
      return "App: substituted type";
    if (!check_subst_derivation(s)) return "App: invalid substitution derivation";
    return {};
  }
  return "unknown rule " + d.rule;
}

bool check_rec(const TypingDerivation& d, DerivationCheck& out, std::unordered_set<const TypingDerivation*>& seen) {
  if (!seen.insert(&d).second) return true;
  std::string msg = check_node(d);
  if (!msg.empty()) {
    out.ok = false;
    out.message = msg;
    out.path.insert(out.path.begin(), d.rule);
    return false;
  }
  for (const auto& q : d.premises) {
    if (!check_rec(*q, out, seen)) {
      out.path.insert(out.path.begin(), d.rule);
      return false;
    }
  }
  return true;
}

}  // namespace

InferResult infer(const Context& ctx, const Term& e, const InferOptions& options) {
  if (options.check_context) check_context(ctx);
  Inferencer inf(options);
  TypingDerivationPtr d = inf.run(ctx, e);
  return InferResult{d->phi, d->type, d};
}

DerivationCheck check_derivation(const TypingDerivation& d) {
  DerivationCheck out;
  std::unordered_set<const TypingDerivation*> seen;
  check_rec(d, out, seen);
  return out;
}

}  // namespace occ
