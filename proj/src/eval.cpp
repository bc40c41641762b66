#include "occ/eval.hpp"

#include <algorithm>

namespace occ {

namespace {

bool is_prefix(const std::vector<std::string>& p, const std::vector<std::string>& of) {
  return p.size() <= of.size() && std::equal(p.begin(), p.end(), of.begin());
}

// Counts rule applications and recursion depth.
class Budget {
 public:
  explicit Budget(const EvalOptions& o) : max_steps_(o.max_steps), max_depth_(o.max_depth) {}

  void tick() {
    if (++steps_ > max_steps_) {
      throw Error(ErrorKind::BudgetExceeded,
                  "evaluation exceeded the budget of " + std::to_string(max_steps_) + " rule applications");
    }
  }
  std::size_t steps() const { return steps_; }

  struct Scope {
    explicit Scope(Budget& b) : b_(b) {
      if (++b_.depth_ > b_.max_depth_) {
        --b_.depth_;
        throw Error(ErrorKind::BudgetExceeded,
                    "evaluation exceeded the nesting limit of " + std::to_string(b_.max_depth_));
      }
    }
    ~Scope() { --b_.depth_; }
    Scope(const Scope&) = delete;
    Scope& operator=(const Scope&) = delete;
    Budget& b_;
  };

 private:
  std::size_t steps_ = 0;
  std::size_t depth_ = 0;
  std::size_t max_steps_;
  std::size_t max_depth_;
};

// Re-indexes `psi` over `names`; a 1 outside `names` cannot be carried over.
DepVector align(const DepVector& psi, const std::vector<std::string>& names) {
  DepVector out = DepVector::zeros(names);
  for (const auto& en : psi) {
    if (en.dep == Dep::Zero) continue;
    if (std::find(names.begin(), names.end(), en.name) == names.end()) {
      throw Error(ErrorKind::TypeMismatch, "recorded dependency on " + en.name + " is out of scope");
    }
    out.set(en.name, Dep::One);
  }
  return out;
}

[[noreturn]] void stuck(const Term& e, const std::string& reason) {
  throw Error(ErrorKind::StuckError, "evaluation is stuck at " + std::string(term_kind_name(e.kind())) + ": " + reason,
              e.loc());
}

// ---------------------------------------------------------------------------
// Open semantics
// ---------------------------------------------------------------------------

class OpenEvaluator {
 public:
  explicit OpenEvaluator(const EvalOptions& o) : opts_(o), budget_(o) {}

  Value run(const Valuation& vals, const Context* ctx, const Term& e, ReductionDerivationPtr* out) {
    return eval(vals, ctx, e, out);
  }

  std::size_t steps() const { return budget_.steps(); }
  SelfCheckReport report;

 private:
  std::optional<InferResult> try_infer(const Context& ctx, const Term& e) {
    InferOptions o;
    o.weaken_annotations = true;
    o.check_context = false;
    try {
      return infer(ctx, e, o);
    } catch (const Error& err) {
      if (err.kind() == ErrorKind::Internal) throw;
      ++report.typing_lost;
      return std::nullopt;
    }
  }

  // Value substitution preserves typing, checked on one step. Returns the
  // substituted type of w' when the premises hold.
  std::optional<Type> lemma_step(const Context& gamma, const std::string& y, const Witness& wit, const Value& v,
                                 const Value& w, const std::optional<Type>& sigma, const Value& w2) {
    if (!opts_.self_check || !sigma) return std::nullopt;
    ++report.checks;
    if (!value_has_type(gamma, v, wit.type) || !value_has_type(gamma.extended(y, wit.type), w, *sigma)) {
      ++report.premise_failures;
      return std::nullopt;
    }
    Type tau;
    try {
      tau = subst_type(gamma, y, wit.type, Context{}, *sigma, wit.psi).type;
    } catch (const Error& err) {
      if (err.kind() == ErrorKind::Internal) throw;
      ++report.premise_failures;
      return std::nullopt;
    }
    try {
      check_value(gamma, w2, tau);
    } catch (const Error& err) {
      if (err.kind() == ErrorKind::Internal) throw;
      report.failures.push_back("substituting " + y + ": " + err.message());
      return std::nullopt;
    }
    return tau;
  }

  Value eval(const Valuation& V, const Context* G, const Term& e, ReductionDerivationPtr* out) {
    budget_.tick();
    Budget::Scope depth(budget_);
    std::shared_ptr<ReductionDerivation> d;
    if (out) {
      d = std::make_shared<ReductionDerivation>();
      d->env = V;
      d->term = e;
    }
    auto premise = [&](const Valuation& env, const Context* g, const Term& t) {
      if (!d) return eval(env, g, t, nullptr);
      ReductionDerivationPtr p;
      Value v = eval(env, g, t, &p);
      d->premises.push_back(p);
      return v;
    };
    auto record_subst = [&](const std::string& var, const Value& before, const Value& bound, const Value& after) {
      if (d) d->substitutions.push_back({var, before, bound, after});
    };

    Value result;
    try {
      switch (e.kind()) {
        case Term::Kind::Var: {
          if (d) d->rule = "Red-Var";
          const Value* v = V.find(e.name());
          if (!v) throw Error(ErrorKind::UnboundVariable, "unbound variable " + e.name()).with_subject(e.name());
          result = *v;
          break;
        }
        case Term::Kind::Lam:
        case Term::Kind::Fix:
          if (d) d->rule = e.kind() == Term::Kind::Lam ? "Red-Lam" : "Red-Lam-Fix";
          result = Value::closure(V.names(), {}, e);
          break;
        case Term::Kind::Pair: {
          if (d) d->rule = "Red-Pair";
          Value a = premise(V, G, e.first());
          Value b = premise(V, G, e.second());
          result = Value::pair(std::move(a), std::move(b));
          break;
        }
        case Term::Kind::Proj: {
          if (d) d->rule = "Red-Proj";
          Value p = premise(V, G, e.first());
          if (!p.is_pair()) stuck(e, "projection of a value that is not a pair");
          result = e.index() == 1 ? p.first() : p.second();
          break;
        }
        case Term::Kind::Let:
          if (d) d->rule = "Red-Let";
          result = eval_let(V, G, e, premise, record_subst);
          break;
        case Term::Kind::App:
          result = eval_app(V, G, e, d.get(), premise, record_subst);
          break;
      }
    } catch (Error& err) {
      err.set_location_if_unknown(e.loc());
      throw;
    }
    if (d) {
      d->value = result;
      *out = d;
    }
    return result;
  }

  template <class Premise, class Record>
  Value eval_let(const Valuation& V, const Context* G, const Term& e, Premise& premise, Record& record_subst) {
    const std::string& x = e.name();
    Value v1 = premise(V, G, e.first());
    std::optional<InferResult> r1;
    std::optional<Context> G2;
    if (G) {
      r1 = try_infer(*G, e.first());
      if (r1) G2 = G->extended(x, r1->type);
    }
    Value v2 = premise(V.extended(x, v1), G2 ? &*G2 : nullptr, e.second());
    std::optional<Witness> wit;
    if (r1) wit = Witness{r1->type, r1->phi};
    Value out = subst_value(v2, x, v1, wit);
    record_subst(x, v2, v1, out);
    if (opts_.self_check && G2) {
      std::optional<Type> sigma;
      if (auto r2 = try_infer(*G2, e.second())) sigma = r2->type;
      lemma_step(*G, x, *wit, v1, v2, sigma, out);
    }
    return out;
  }

  template <class Premise, class Record>
  Value eval_app(const Valuation& V, const Context* G, const Term& e, ReductionDerivation* d, Premise& premise,
                 Record& record_subst) {
    Value f = premise(V, G, e.first());
    if (!f.is_closure()) stuck(e, "application of a value that is not a closure");
    Value arg = premise(V, G, e.second());
    const auto& pending = f.pending();
    if (!is_prefix(pending, V.names())) {
      throw Error(ErrorKind::PrefixError,
                  "pending variables of the applied closure are not a prefix of the current valuation");
    }
    const auto& caps = f.captured();
    const Term& code = f.code();
    const bool fix = code.kind() == Term::Kind::Fix;
    if (d) d->rule = fix ? "Red-App-Fix" : "Red-App";

    // Static information for the body, when every capture carries a witness.
    std::optional<Context> Gb;
    std::vector<Witness> cap_wits;
    std::optional<Witness> arg_wit;
    std::optional<InferResult> rarg;
    const bool recorded =
        std::all_of(caps.begin(), caps.end(), [](const Captured& c) { return c.witness.has_value(); });
    if (G && recorded) rarg = try_infer(*G, e.second());
    if (G && !recorded) ++report.typing_lost;

    Valuation env = fix ? V.prefix(pending.size()) : V;
    if (rarg) {
      try {
        Context g = fix ? G->prefix(pending.size()) : *G;
        for (const auto& c : caps) {
          Witness w{weaken_to(g, c.witness->type), align(c.witness->psi, g.names())};
          cap_wits.push_back(w);
          g.push_back(c.name, w.type);
        }
        if (fix) {
          auto rf = try_infer(g, code);
          if (!rf) throw Error(ErrorKind::TypeMismatch, "fix code does not re-type");
          g.push_back(code.fname(), rf->type);
        }
        Type sigma = weaken_to(g, code.param_type());
        std::vector<std::string> names = g.names();
        bool inside = std::all_of(rarg->phi.begin(), rarg->phi.end(), [&](const DepVector::Entry& en) {
          return en.dep == Dep::Zero || std::find(names.begin(), names.end(), en.name) != names.end();
        });
        DepVector psi = DepVector::zeros(names);
        for (const auto& en : rarg->phi) {
          if (en.dep == Dep::One && inside) psi.set(en.name, Dep::One);
        }
        if (inside) arg_wit = Witness{sigma, psi};
        g.push_back(code.name(), sigma);
        Gb = std::move(g);
      } catch (const Error& err) {
        if (err.kind() == ErrorKind::Internal) throw;
        ++report.typing_lost;
        Gb.reset();
        cap_wits.clear();
        arg_wit.reset();
      }
    }

    for (const auto& c : caps) env.push_back(c.name, c.value);
    if (fix) {
      std::vector<std::string> self = env.names();
      env.push_back(code.fname(), Value::closure(std::move(self), {}, code));
    }
    env.push_back(code.name(), arg);

    Value w = premise(env, Gb ? &*Gb : nullptr, code.body());
    if (fix) return w;

    std::optional<Type> sigma;
    if (opts_.self_check && Gb) {
      if (auto rb = try_infer(*Gb, code.body())) sigma = rb->type;
    }
    Context gamma;
    if (Gb) gamma = Gb->prefix(Gb->size() - 1);

    Value cur = subst_value(w, code.name(), arg, arg_wit);
    record_subst(code.name(), w, arg, cur);
    if (arg_wit) sigma = lemma_step(gamma, code.name(), *arg_wit, arg, w, sigma, cur);
    for (std::size_t i = caps.size(); i-- > 0;) {
      std::optional<Witness> wit;
      if (Gb) wit = cap_wits[i];
      Value next = subst_value(cur, caps[i].name, caps[i].value, wit);
      record_subst(caps[i].name, cur, caps[i].value, next);
      if (wit) {
        gamma = gamma.prefix(gamma.size() - 1);
        sigma = lemma_step(gamma, caps[i].name, *wit, caps[i].value, cur, sigma, next);
      }
      cur = std::move(next);
    }
    return cur;
  }

  EvalOptions opts_;
  Budget budget_;
};

// ---------------------------------------------------------------------------
// Classic semantics
// ---------------------------------------------------------------------------

const ClassicValue* classic_lookup(const ClassicEnv& env, const std::string& name) {
  for (auto it = env.rbegin(); it != env.rend(); ++it) {
    if (it->name == name) return &it->value;
  }
  return nullptr;
}

class ClassicEvaluator {
 public:
  explicit ClassicEvaluator(const EvalOptions& o) : budget_(o) {}

  ClassicValue eval(const ClassicEnv& W, const Term& e, ClassicDerivationPtr* out) {
    budget_.tick();
    Budget::Scope depth(budget_);
    std::shared_ptr<ClassicDerivation> d;
    if (out) {
      d = std::make_shared<ClassicDerivation>();
      d->env = W;
      d->term = e;
    }
    auto premise = [&](const ClassicEnv& env, const Term& t) {
      if (!d) return eval(env, t, nullptr);
      ClassicDerivationPtr p;
      ClassicValue v = eval(env, t, &p);
      d->premises.push_back(p);
      return v;
    };
    auto tag = [&](const char* rule) {
      if (d) d->rule = rule;
    };

    ClassicValue result;
    try {
      switch (e.kind()) {
        case Term::Kind::Var: {
          tag("Classic-Red-Var");
          const ClassicValue* v = classic_lookup(W, e.name());
          if (!v) throw Error(ErrorKind::UnboundVariable, "unbound variable " + e.name()).with_subject(e.name());
          result = *v;
          break;
        }
        case Term::Kind::Lam:
          tag("Classic-Red-Lam");
          result = ClassicValue::closure(W, e);
          break;
        case Term::Kind::Fix:
          tag("Classic-Red-Lam-Fix");
          result = ClassicValue::closure(W, e);
          break;
        case Term::Kind::Pair: {
          tag("Classic-Red-Pair");
          ClassicValue a = premise(W, e.first());
          ClassicValue b = premise(W, e.second());
          result = ClassicValue::pair(std::move(a), std::move(b));
          break;
        }
        case Term::Kind::Proj: {
          tag("Classic-Red-Proj");
          ClassicValue p = premise(W, e.first());
          if (p.kind() != ClassicValue::Kind::Pair) stuck(e, "projection of a value that is not a pair");
          result = e.index() == 1 ? p.first() : p.second();
          break;
        }
        case Term::Kind::Let: {
          tag("Classic-Red-Let");
          ClassicValue v1 = premise(W, e.first());
          ClassicEnv W2 = W;
          W2.push_back({e.name(), v1});
          result = premise(W2, e.second());
          break;
        }
        case Term::Kind::App: {
          ClassicValue f = premise(W, e.first());
          if (f.kind() != ClassicValue::Kind::Closure) stuck(e, "application of a value that is not a closure");
          ClassicValue arg = premise(W, e.second());
          const Term& code = f.code();
          ClassicEnv body = f.env();
          if (code.kind() == Term::Kind::Fix) {
            tag("Classic-Red-App-Fix");
            body.push_back({code.fname(), f});
          } else {
            tag("Classic-Red-App");
          }
          body.push_back({code.name(), arg});
          result = premise(body, code.body());
          break;
        }
      }
    } catch (Error& err) {
      err.set_location_if_unknown(e.loc());
      throw;
    }
    if (d) {
      d->value = result;
      *out = d;
    }
    return result;
  }

  std::size_t steps() const { return budget_.steps(); }

 private:
  Budget budget_;
};

// `vals` is the valuation in whose scope `v` lives.
ClassicValue to_classic(const Valuation& vals, const Value& v) {
  switch (v.kind()) {
    case Value::Kind::Atom:
      return ClassicValue::atom(v.atom_type(), v.constant());
    case Value::Kind::Pair:
      return ClassicValue::pair(to_classic(vals, v.first()), to_classic(vals, v.second()));
    case Value::Kind::Closure: {
      if (!is_prefix(v.pending(), vals.names())) {
        internal_error("closure pending variables are not a prefix of its valuation");
      }
      Valuation open = vals.prefix(v.pending().size());
      for (const auto& c : v.captured()) open.push_back(c.name, c.value);
      return ClassicValue::closure(classic_env_of(open), v.code());
    }
  }
  internal_error("unknown value kind");
}

}  // namespace

EvalResult eval_open(const Valuation& vals, const Term& e, const EvalOptions& options) {
  if (options.typing && options.typing->names() != vals.names()) {
    internal_error("typing context does not match the valuation");
  }
  OpenEvaluator ev(options);
  EvalResult r;
  r.value = ev.run(vals, options.typing ? &*options.typing : nullptr, e,
                   options.record_derivation ? &r.derivation : nullptr);
  r.steps = ev.steps();
  r.self_check = std::move(ev.report);
  return r;
}

ClassicResult eval_classic(const ClassicEnv& env, const Term& e, const EvalOptions& options) {
  ClassicEvaluator ev(options);
  ClassicResult r;
  r.value = ev.eval(env, e, options.record_derivation ? &r.derivation : nullptr);
  r.steps = ev.steps();
  return r;
}

// ---------------------------------------------------------------------------
// Classic values
// ---------------------------------------------------------------------------

ClassicValue ClassicValue::atom(std::string atom_type, std::string constant) {
  auto n = std::make_shared<ClassicValueNode>();
  n->kind = Kind::Atom;
  n->atom_type = std::move(atom_type);
  n->constant = std::move(constant);
  return ClassicValue(std::move(n));
}

ClassicValue ClassicValue::pair(ClassicValue a, ClassicValue b) {
  auto n = std::make_shared<ClassicValueNode>();
  n->kind = Kind::Pair;
  n->first = std::move(a);
  n->second = std::move(b);
  return ClassicValue(std::move(n));
}

ClassicValue ClassicValue::closure(std::vector<Binding> env, Term code) {
  if (code.kind() != Term::Kind::Lam && code.kind() != Term::Kind::Fix) {
    internal_error("closure code must be a lambda or a fix");
  }
  auto n = std::make_shared<ClassicValueNode>();
  n->kind = Kind::Closure;
  n->env = std::move(env);
  n->code = std::move(code);
  return ClassicValue(std::move(n));
}

ClassicValue::Kind ClassicValue::kind() const {
  if (!node_) internal_error("use of an empty classic value");
  return node_->kind;
}
const std::string& ClassicValue::atom_type() const {
  if (kind() != Kind::Atom) internal_error("atom_type on a non-atom value");
  return node_->atom_type;
}
const std::string& ClassicValue::constant() const {
  if (kind() != Kind::Atom) internal_error("constant on a non-atom value");
  return node_->constant;
}
const ClassicValue& ClassicValue::first() const {
  if (kind() != Kind::Pair) internal_error("first on a non-pair value");
  return node_->first;
}
const ClassicValue& ClassicValue::second() const {
  if (kind() != Kind::Pair) internal_error("second on a non-pair value");
  return node_->second;
}
const std::vector<ClassicValue::Binding>& ClassicValue::env() const {
  if (kind() != Kind::Closure) internal_error("env on a non-closure value");
  return node_->env;
}
const Term& ClassicValue::code() const {
  if (kind() != Kind::Closure) internal_error("code on a non-closure value");
  return node_->code;
}

ClassicEnv classic_env_of(const Valuation& vals) {
  ClassicEnv out;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    out.push_back({vals[i].name, to_classic(vals.prefix(i), vals[i].value)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Equivalence across the two semantics
// ---------------------------------------------------------------------------

bool values_equiv_semantics(const Valuation& vals, const Value& v, const ClassicEnv& env, const ClassicValue& w) {
  switch (v.kind()) {
    case Value::Kind::Atom:
      return w.kind() == ClassicValue::Kind::Atom && v.atom_type() == w.atom_type() && v.constant() == w.constant();
    case Value::Kind::Pair:
      return w.kind() == ClassicValue::Kind::Pair && values_equiv_semantics(vals, v.first(), env, w.first()) &&
             values_equiv_semantics(vals, v.second(), env, w.second());
    case Value::Kind::Closure: {
      if (w.kind() != ClassicValue::Kind::Closure) return false;
      if (!alpha_equal(v.code(), w.code())) return false;
      if (!is_prefix(v.pending(), vals.names())) return false;
      Valuation open = vals.prefix(v.pending().size());
      for (const auto& c : v.captured()) open.push_back(c.name, c.value);
      const ClassicEnv& W = w.env();
      std::size_t k = 0;
      for (std::size_t j = 0; j < W.size(); ++j) {
        while (k < open.size() && open[k].name != W[j].name) ++k;
        if (k == open.size()) return false;
        ClassicEnv wp(W.begin(), W.begin() + static_cast<std::ptrdiff_t>(j));
        if (!values_equiv_semantics(open.prefix(k), open[k].value, wp, W[j].value)) return false;
        ++k;
      }
      return true;
    }
  }
  return false;
}

bool valuations_equiv_semantics(const Valuation& vals, const ClassicEnv& env) {
  if (vals.size() != env.size()) return false;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (vals[i].name != env[i].name) return false;
    ClassicEnv wp(env.begin(), env.begin() + static_cast<std::ptrdiff_t>(i));
    if (!values_equiv_semantics(vals.prefix(i), vals[i].value, wp, env[i].value)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Derivation validators
// ---------------------------------------------------------------------------

namespace {

bool same_classic(const ClassicValue& a, const ClassicValue& b) {
  if (a.node() == b.node()) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case ClassicValue::Kind::Atom:
      return a.atom_type() == b.atom_type() && a.constant() == b.constant();
    case ClassicValue::Kind::Pair:
      return same_classic(a.first(), b.first()) && same_classic(a.second(), b.second());
    case ClassicValue::Kind::Closure: {
      if (a.env().size() != b.env().size() || !alpha_equal(a.code(), b.code())) return false;
      for (std::size_t i = 0; i < a.env().size(); ++i) {
        if (a.env()[i].name != b.env()[i].name || !same_classic(a.env()[i].value, b.env()[i].value)) return false;
      }
      return true;
    }
  }
  return false;
}

bool same_valuation(const Valuation& a, const Valuation& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].name != b[i].name || !same_value(a[i].value, b[i].value)) return false;
  }
  return true;
}

bool same_env(const ClassicEnv& a, const ClassicEnv& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].name != b[i].name || !same_classic(a[i].value, b[i].value)) return false;
  }
  return true;
}

std::string check_open_node(const ReductionDerivation& d) {
  const Term& e = d.term;
  const auto& ps = d.premises;
  auto arity = [&](std::size_t n) { return ps.size() == n; };
  auto premise_ok = [&](std::size_t i, const Valuation& env, const Term& t) {
    return ps[i] && same_valuation(ps[i]->env, env) && ps[i]->term.node() == t.node();
  };
  // Checks the chain of substitution steps starting from `start`.
  auto chain = [&](Value start, const std::vector<std::pair<std::string, Value>>& binds) -> bool {
    if (d.substitutions.size() != binds.size()) return false;
    for (std::size_t i = 0; i < binds.size(); ++i) {
      const auto& s = d.substitutions[i];
      if (s.var != binds[i].first || !same_value(s.bound, binds[i].second) || !same_value(s.before, start)) {
        return false;
      }
      Value expect = subst_value(s.before, s.var, s.bound);
      if (!same_value(expect, s.after)) return false;
      start = s.after;
    }
    return same_value(start, d.value);
  };

  if (d.rule == "Red-Var") {
    const Value* v = e.kind() == Term::Kind::Var ? d.env.find(e.name()) : nullptr;
    if (!v || !arity(0) || !same_value(*v, d.value)) return "variable lookup does not match the valuation";
    return "";
  }
  if (d.rule == "Red-Lam" || d.rule == "Red-Lam-Fix") {
    Term::Kind k = d.rule == "Red-Lam" ? Term::Kind::Lam : Term::Kind::Fix;
    if (e.kind() != k || !arity(0) || !d.value.is_closure() || d.value.pending() != d.env.names() ||
        !d.value.captured().empty() || !alpha_equal(d.value.code(), e)) {
      return "closure must record the whole domain and capture nothing";
    }
    return "";
  }
  if (d.rule == "Red-Pair") {
    if (e.kind() != Term::Kind::Pair || !arity(2) || !premise_ok(0, d.env, e.first()) ||
        !premise_ok(1, d.env, e.second()) || !d.value.is_pair() || !same_value(d.value.first(), ps[0]->value) ||
        !same_value(d.value.second(), ps[1]->value)) {
      return "pair premises do not match the conclusion";
    }
    return "";
  }
  if (d.rule == "Red-Proj") {
    if (e.kind() != Term::Kind::Proj || !arity(1) || !premise_ok(0, d.env, e.first()) || !ps[0]->value.is_pair()) {
      return "projection premise is not a pair";
    }
    const Value& c = e.index() == 1 ? ps[0]->value.first() : ps[0]->value.second();
    if (!same_value(c, d.value)) return "projection does not select the right component";
    return "";
  }
  if (d.rule == "Red-Let") {
    if (e.kind() != Term::Kind::Let || !arity(2) || !premise_ok(0, d.env, e.first()) ||
        !premise_ok(1, d.env.extended(e.name(), ps[0]->value), e.second())) {
      return "let premises do not match";
    }
    if (!chain(ps[1]->value, {{e.name(), ps[0]->value}})) return "let substitution step is wrong";
    return "";
  }
  if (d.rule == "Red-App" || d.rule == "Red-App-Fix") {
    if (e.kind() != Term::Kind::App || !arity(3) || !premise_ok(0, d.env, e.first()) ||
        !premise_ok(1, d.env, e.second())) {
      return "application premises do not match";
    }
    const Value& f = ps[0]->value;
    bool fix = d.rule == "Red-App-Fix";
    if (!f.is_closure() || (f.code().kind() == Term::Kind::Fix) != fix) return "applied value has the wrong code";
    if (!is_prefix(f.pending(), d.env.names())) return "pending variables are not a prefix";
    const Term& code = f.code();
    Valuation env = fix ? d.env.prefix(f.pending().size()) : d.env;
    for (const auto& c : f.captured()) env.push_back(c.name, c.value);
    if (fix) env.push_back(code.fname(), Value::closure(env.names(), {}, code));
    env.push_back(code.name(), ps[1]->value);
    if (!premise_ok(2, env, code.body())) return "body premise is evaluated in the wrong valuation";
    if (fix) {
      if (!d.substitutions.empty() || !same_value(ps[2]->value, d.value)) return "fix application result differs";
      return "";
    }
    std::vector<std::pair<std::string, Value>> binds = {{code.name(), ps[1]->value}};
    for (std::size_t i = f.captured().size(); i-- > 0;) binds.emplace_back(f.captured()[i].name, f.captured()[i].value);
    if (!chain(ps[2]->value, binds)) return "substitution chain after the body is wrong";
    return "";
  }
  return "unknown rule " + d.rule;
}

std::string check_classic_node(const ClassicDerivation& d) {
  const Term& e = d.term;
  const auto& ps = d.premises;
  auto premise_ok = [&](std::size_t i, const ClassicEnv& env, const Term& t) {
    return i < ps.size() && ps[i] && same_env(ps[i]->env, env) && ps[i]->term.node() == t.node();
  };
  if (d.rule == "Classic-Red-Var") {
    const ClassicValue* v = e.kind() == Term::Kind::Var ? classic_lookup(d.env, e.name()) : nullptr;
    return v && ps.empty() && same_classic(*v, d.value) ? "" : "variable lookup does not match the environment";
  }
  if (d.rule == "Classic-Red-Lam" || d.rule == "Classic-Red-Lam-Fix") {
    bool ok = ps.empty() && d.value.kind() == ClassicValue::Kind::Closure && same_env(d.value.env(), d.env) &&
              alpha_equal(d.value.code(), e);
    return ok ? "" : "closure must capture the whole environment";
  }
  if (d.rule == "Classic-Red-Pair") {
    bool ok = ps.size() == 2 && premise_ok(0, d.env, e.first()) && premise_ok(1, d.env, e.second()) &&
              same_classic(d.value, ClassicValue::pair(ps[0]->value, ps[1]->value));
    return ok ? "" : "pair premises do not match the conclusion";
  }
  if (d.rule == "Classic-Red-Proj") {
    if (ps.size() != 1 || !premise_ok(0, d.env, e.first()) || ps[0]->value.kind() != ClassicValue::Kind::Pair) {
      return "projection premise is not a pair";
    }
    const ClassicValue& c = e.index() == 1 ? ps[0]->value.first() : ps[0]->value.second();
    return same_classic(c, d.value) ? "" : "projection does not select the right component";
  }
  if (d.rule == "Classic-Red-Let") {
    if (ps.size() != 2 || !premise_ok(0, d.env, e.first())) return "let premises do not match";
    ClassicEnv env = d.env;
    env.push_back({e.name(), ps[0]->value});
    return premise_ok(1, env, e.second()) && same_classic(ps[1]->value, d.value) ? "" : "let premises do not match";
  }
  if (d.rule == "Classic-Red-App" || d.rule == "Classic-Red-App-Fix") {
    if (ps.size() != 3 || !premise_ok(0, d.env, e.first()) || !premise_ok(1, d.env, e.second())) {
      return "application premises do not match";
    }
    const ClassicValue& f = ps[0]->value;
    if (f.kind() != ClassicValue::Kind::Closure) return "applied value is not a closure";
    bool fix = d.rule == "Classic-Red-App-Fix";
    if ((f.code().kind() == Term::Kind::Fix) != fix) return "applied value has the wrong code";
    ClassicEnv env = f.env();
    if (fix) env.push_back({f.code().fname(), f});
    env.push_back({f.code().name(), ps[1]->value});
    return premise_ok(2, env, f.code().body()) && same_classic(ps[2]->value, d.value)
               ? ""
               : "body premise is evaluated in the wrong environment";
  }
  return "unknown rule " + d.rule;
}

template <class D, class F>
std::string walk(const D& root, F check) {
  std::vector<std::pair<const D*, std::string>> stack = {{&root, root.rule}};
  while (!stack.empty()) {
    auto [d, path] = stack.back();
    stack.pop_back();
    std::string msg = check(*d);
    if (!msg.empty()) return path + ": " + msg;
    for (std::size_t i = d->premises.size(); i-- > 0;) {
      if (!d->premises[i]) return path + ": missing premise";
      stack.push_back({d->premises[i].get(), path + " / " + d->premises[i]->rule});
    }
  }
  return "";
}

}  // namespace

std::string check_reduction_derivation(const ReductionDerivation& d) { return walk(d, check_open_node); }

std::string check_classic_derivation(const ClassicDerivation& d) { return walk(d, check_classic_node); }

}  // namespace occ
