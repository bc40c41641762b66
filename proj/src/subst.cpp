#include "occ/subst.hpp"

#include <algorithm>
#include <unordered_set>

namespace occ {

namespace {

struct Problem {
  Context gamma;
  std::string y;
  Type rho;
  DepVector psi;
};

// Context substitutions for every prefix of Δ; entry k covers Δ[0..k).
struct Chain {
  Context delta;
  Context delta_out;
  std::vector<SubstDerivationPtr> prefixes;
};

std::shared_ptr<SubstDerivation> node(const Problem& p, const Chain& c, std::string rule) {
  auto d = std::make_shared<SubstDerivation>();
  d->rule = std::move(rule);
  d->gamma = p.gamma;
  d->var = p.y;
  d->var_type = p.rho;
  d->psi = p.psi;
  d->delta = c.delta;
  d->delta_out = c.delta_out;
  return d;
}

SubstDerivationPtr type_step(const Problem& p, const Chain& c, const Type& sigma, Type& out);

Chain nil_chain(const Problem& p) {
  Chain c;
  c.prefixes.push_back(node(p, c, "Subst-Context-Nil"));
  return c;
}

void extend_chain(const Problem& p, Chain& c, const std::string& name, const Type& t) {
  Type out;
  SubstDerivationPtr premise;
  try {
    premise = type_step(p, c, t, out);
  } catch (Error& e) {
    e.push_path("Subst-Context(" + name + ")");
    throw;
  }
  c.delta.push_back(name, t);
  c.delta_out.push_back(name, out);
  auto d = node(p, c, "Subst-Context");
  d->premises = {premise};
  c.prefixes.push_back(d);
}

Chain chain_prefix(const Chain& c, std::size_t n) {
  Chain out;
  out.delta = c.delta.prefix(n);
  out.delta_out = c.delta_out.prefix(n);
  out.prefixes.assign(c.prefixes.begin(), c.prefixes.begin() + static_cast<std::ptrdiff_t>(n + 1));
  return out;
}

SubstDerivationPtr type_step(const Problem& p, const Chain& c, const Type& sigma, Type& out) {
  switch (sigma.kind()) {
    case Type::Kind::Atom: {
      auto d = node(p, c, "Subst-Atom");
      d->input = sigma;
      d->output = sigma;
      d->premises = {c.prefixes.back()};
      out = sigma;
      return d;
    }
    case Type::Kind::Product: {
      Type l, r;
      auto dl = type_step(p, c, sigma.left(), l);
      auto dr = type_step(p, c, sigma.right(), r);
      auto d = node(p, c, "Subst-Product");
      d->input = sigma;
      out = (l.node() == sigma.left().node() && r.node() == sigma.right().node()) ? sigma : Type::product(l, r);
      d->output = out;
      d->premises = {dl, dr};
      return d;
    }
    case Type::Kind::Closure: {
      const ClosureData& cl = sigma.closure();
      const Context& captured = cl.captured.context;
      const std::size_t g = p.gamma.size();
      if (captured.size() <= g) {
        auto d = node(p, c, "Subst-Closure-Notin");
        d->input = sigma;
        d->output = sigma;
        d->premises = {c.prefixes.back()};
        out = sigma;
        return d;
      }
      if (captured[g].name != p.y) {
        internal_error("closure context " + captured[g].name + " found where " + p.y +
                       " was expected; the captured context is not a prefix of the ambient context");
      }
      const std::size_t k = captured.size() - g - 1;
      if (k > c.delta.size()) internal_error("closure context is longer than its ambient context");
      for (std::size_t i = 0; i < k; ++i) {
        if (captured[g + 1 + i].name != c.delta[i].name) {
          internal_error("closure context diverges from the ambient context at " + captured[g + 1 + i].name);
        }
      }
      Chain inner = chain_prefix(c, k);
      Type param_out;
      SubstDerivationPtr dparam = type_step(p, inner, cl.param_type, param_out);
      if (!alpha_equal(param_out, cl.param_type)) {
        throw Error(ErrorKind::EscapeError,
                    p.y + " escapes its scope through the parameter type of a closure: the parameter " + cl.param +
                        " is not preserved by the substitution")
            .with_subject(p.y);
      }
      inner.delta.push_back(cl.param, cl.param_type);
      inner.delta_out.push_back(cl.param, cl.param_type);
      {
        auto ext = node(p, inner, "Subst-Context");
        ext->premises = {dparam};
        inner.prefixes.push_back(ext);
      }
      Type result_out;
      SubstDerivationPtr dresult;
      try {
        dresult = type_step(p, inner, cl.result, result_out);
      } catch (Error& e) {
        e.push_path("Subst-Closure(result)");
        throw;
      }

      const Dep chi = cl.captured.deps[g].dep;
      Context ctx_out;
      DepVector deps_out;
      for (std::size_t i = 0; i < g; ++i) {
        ctx_out.push_back(captured[i].name, captured[i].type);
        deps_out.push_back(captured[i].name, dep_or(cl.captured.deps[i].dep, dep_and(chi, p.psi[i].dep)));
      }
      for (std::size_t i = 0; i < k; ++i) {
        ctx_out.push_back(c.delta_out[i].name, c.delta_out[i].type);
        deps_out.push_back(captured[g + 1 + i].name, cl.captured.deps[g + 1 + i].dep);
      }
      ClosureData res;
      res.captured = AnnotatedContext(std::move(ctx_out), std::move(deps_out));
      res.param = cl.param;
      res.param_dep = cl.param_dep;
      res.param_type = cl.param_type;
      res.result = result_out;
      out = Type::closure(std::move(res));

      auto d = node(p, c, "Subst-Closure");
      d->input = sigma;
      d->output = out;
      d->premises = {c.prefixes.back(), dparam, dresult};
      return d;
    }
  }
  internal_error("unreachable type kind");
}

Problem make_problem(const Context& gamma, const std::string& y, const Type& rho, const DepVector& psi) {
  if (!psi.same_domain(DepVector::zeros(gamma))) {
    internal_error("substitution of " + y + ": dependency vector does not range over the preceding context");
  }
  return Problem{gamma, y, rho, psi};
}

Chain chain_for(const Problem& p, const Context& delta) {
  Chain c = nil_chain(p);
  for (const auto& b : delta) extend_chain(p, c, b.name, b.type);
  return c;
}

}  // namespace

ContextSubst subst_context(const Context& gamma, const std::string& y, const Type& rho, const Context& delta,
                           const DepVector& psi) {
  Problem p = make_problem(gamma, y, rho, psi);
  Chain c = chain_for(p, delta);
  return ContextSubst{c.delta_out, c.prefixes.back()};
}

TypeSubst subst_type(const Context& gamma, const std::string& y, const Type& rho, const Context& delta,
                     const Type& sigma, const DepVector& psi) {
  Problem p = make_problem(gamma, y, rho, psi);
  Chain c = chain_for(p, delta);
  Type out;
  auto d = type_step(p, c, sigma, out);
  return TypeSubst{c.delta_out, out, d};
}

AnnotatedSubst subst_annotated(const AnnotatedContext& ctx, const std::string& y, const DepVector& psi,
                               const Type& tau) {
  auto idx = ctx.context.find(y);
  if (!idx) internal_error("substituted variable " + y + " is not in the context");
  Context gamma = ctx.context.prefix(*idx);
  Context delta = ctx.context.suffix(*idx + 1);
  TypeSubst r = subst_type(gamma, y, ctx.context[*idx].type, delta, tau, psi);
  const Dep chi = ctx.deps[*idx].dep;
  Context out_ctx = gamma.concat(r.delta);
  DepVector out_deps;
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    out_deps.push_back(gamma[i].name, dep_or(ctx.deps[i].dep, dep_and(chi, psi[i].dep)));
  }
  for (std::size_t i = 0; i < delta.size(); ++i) {
    out_deps.push_back(delta[i].name, ctx.deps[*idx + 1 + i].dep);
  }
  return AnnotatedSubst{AnnotatedContext(std::move(out_ctx), std::move(out_deps)), r.type, r.derivation};
}

AnnotatedSubst subst_sequence(const AnnotatedContext& ctx, const std::vector<SubstBinding>& bindings,
                              const Type& tau) {
  Context full = ctx.context;
  DepVector deps = ctx.deps;
  for (const auto& b : bindings) {
    full.push_back(b.name, b.type);
    deps.push_back(b.name, b.dep);
  }
  AnnotatedSubst cur{AnnotatedContext(std::move(full), std::move(deps)), tau, nullptr};
  auto seq = std::make_shared<SubstDerivation>();
  seq->rule = "Subst-Sequence";
  for (std::size_t i = bindings.size(); i-- > 0;) {
    AnnotatedSubst step = subst_annotated(cur.context, bindings[i].name, bindings[i].psi, cur.type);
    seq->premises.push_back(step.derivation);
    cur = std::move(step);
  }
  if (!bindings.empty()) {
    seq->input = tau;
    seq->output = cur.type;
    cur.derivation = seq;
  }
  return cur;
}

// ---------------------------------------------------------------------------
// Schema checking
// ---------------------------------------------------------------------------

namespace {

bool same_context(const Context& a, const Context& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].name != b[i].name || !alpha_equal(a[i].type, b[i].type)) return false;
  }
  return true;
}

bool same_problem(const SubstDerivation& a, const SubstDerivation& b) {
  return a.var == b.var && a.psi == b.psi && same_context(a.gamma, b.gamma) && alpha_equal(a.var_type, b.var_type);
}

bool is_context_node(const SubstDerivation& d) { return !d.input && !d.output; }

bool valid_node(const SubstDerivation& d) {
  const auto& p = d.premises;
  for (const auto& q : p) {
    if (!q) return false;
  }
  if (d.rule == "Subst-Sequence") {
    return std::all_of(p.begin(), p.end(), [](const SubstDerivationPtr& q) {
      return q->input.has_value() && q->output.has_value();
    });
  }
  if (d.delta.size() != d.delta_out.size()) return false;
  for (std::size_t i = 0; i < d.delta.size(); ++i) {
    if (d.delta[i].name != d.delta_out[i].name) return false;
  }
  for (const auto& q : p) {
    if (!same_problem(d, *q)) return false;
  }
  if (d.rule == "Subst-Context-Nil") return is_context_node(d) && d.delta.empty() && p.empty();
  if (d.rule == "Subst-Context") {
    if (!is_context_node(d) || d.delta.empty() || p.size() != 1) return false;
    const std::size_t n = d.delta.size() - 1;
    const auto& q = *p[0];
    return q.input && q.output && same_context(q.delta, d.delta.prefix(n)) &&
           same_context(q.delta_out, d.delta_out.prefix(n)) && alpha_equal(*q.input, d.delta[n].type) &&
           alpha_equal(*q.output, d.delta_out[n].type);
  }
  if (!d.input || !d.output) return false;
  const Type& in = *d.input;
  const Type& out = *d.output;
  auto ctx_premise = [&](const SubstDerivation& q) {
    return is_context_node(q) && same_context(q.delta, d.delta) && same_context(q.delta_out, d.delta_out);
  };
  if (d.rule == "Subst-Atom") {
    return in.is_atom() && alpha_equal(in, out) && p.size() == 1 && ctx_premise(*p[0]);
  }
  if (d.rule == "Subst-Product") {
    if (!in.is_product() || !out.is_product() || p.size() != 2) return false;
    for (int i = 0; i < 2; ++i) {
      const auto& q = *p[static_cast<std::size_t>(i)];
      if (!q.input || !q.output || !same_context(q.delta, d.delta) || !same_context(q.delta_out, d.delta_out)) {
        return false;
      }
    }
    return alpha_equal(*p[0]->input, in.left()) && alpha_equal(*p[1]->input, in.right()) &&
           alpha_equal(*p[0]->output, out.left()) && alpha_equal(*p[1]->output, out.right());
  }
  if (d.rule == "Subst-Closure-Notin") {
    return in.is_closure() && in.closure().captured.size() <= d.gamma.size() && alpha_equal(in, out) &&
           p.size() == 1 && ctx_premise(*p[0]);
  }
  if (d.rule == "Subst-Closure") {
    if (!in.is_closure() || !out.is_closure() || p.size() != 3) return false;
    const ClosureData& ci = in.closure();
    const ClosureData& co = out.closure();
    const std::size_t g = d.gamma.size();
    if (ci.captured.size() <= g || ci.captured.context[g].name != d.var) return false;
    const std::size_t k = ci.captured.size() - g - 1;
    if (!ctx_premise(*p[0])) return false;
    const auto& qp = *p[1];
    const auto& qr = *p[2];
    if (!qp.input || !qp.output || !alpha_equal(*qp.input, ci.param_type) || !alpha_equal(*qp.output, ci.param_type))
      return false;
    if (k > d.delta.size() || !same_context(qp.delta, d.delta.prefix(k)) ||
        !same_context(qp.delta_out, d.delta_out.prefix(k)))
      return false;
    if (!qr.input || !qr.output || !alpha_equal(*qr.input, ci.result) ||
        !same_context(qr.delta, d.delta.prefix(k).extended(ci.param, ci.param_type)) ||
        !same_context(qr.delta_out, d.delta_out.prefix(k).extended(ci.param, ci.param_type)))
      return false;
    if (co.captured.size() != g + k || co.param_dep != ci.param_dep || !alpha_equal(co.param_type, ci.param_type))
      return false;
    const Dep chi = ci.captured.deps[g].dep;
    for (std::size_t i = 0; i < g; ++i) {
      if (co.captured.context[i].name != ci.captured.context[i].name) return false;
      if (co.captured.deps[i].dep != dep_or(ci.captured.deps[i].dep, dep_and(chi, d.psi[i].dep))) return false;
    }
    for (std::size_t i = 0; i < k; ++i) {
      if (co.captured.context[g + i].name != d.delta_out[i].name ||
          !alpha_equal(co.captured.context[g + i].type, d.delta_out[i].type))
        return false;
      if (co.captured.deps[g + i].dep != ci.captured.deps[g + 1 + i].dep) return false;
    }
    // Result types are compared under the shared parameter name.
    return alpha_equal(rename_param(out, ci.param), Type::closure(ClosureData{co.captured, ci.param, co.param_dep,
                                                                               co.param_type, *qr.output}));
  }
  return false;
}

}  // namespace

bool check_subst_derivation(const SubstDerivation& d) {
  std::unordered_set<const SubstDerivation*> seen;
  std::vector<const SubstDerivation*> todo{&d};
  while (!todo.empty()) {
    const SubstDerivation* n = todo.back();
    todo.pop_back();
    if (!seen.insert(n).second) continue;
    if (!valid_node(*n)) return false;
    for (const auto& p : n->premises) todo.push_back(p.get());
  }
  return true;
}

}  // namespace occ
