#include "occ/analysis.hpp"

#include <algorithm>
#include <random>
#include <set>

#include "json.hpp"
#include "occ/typing.hpp"

namespace occ {

// ---------------------------------------------------------------------------
// Domains and enumeration
// ---------------------------------------------------------------------------

void AtomDomain::set(const std::string& atom, std::vector<std::string> constants) {
  if (constants.empty()) internal_error("atom domain for " + atom + " is empty");
  std::set<std::string> seen(constants.begin(), constants.end());
  if (seen.size() != constants.size()) internal_error("atom domain for " + atom + " repeats a constant");
  explicit_[atom] = std::move(constants);
}

std::vector<std::string> AtomDomain::constants(const std::string& atom) const {
  if (auto it = explicit_.find(atom); it != explicit_.end()) return it->second;
  std::vector<std::string> out;
  if (atom.rfind("ty_", 0) == 0) {
    std::string base = "val_" + atom.substr(3);
    for (std::size_t i = 0; i < per_atom_; ++i) out.push_back(base + std::string(i, '\''));
    return out;
  }
  for (std::size_t i = 0; i < per_atom_; ++i) out.push_back("c" + std::to_string(i) + "_" + atom);
  return out;
}

std::vector<Value> enumerate_values(const Type& t, const AtomDomain& dom) {
  switch (t.kind()) {
    case Type::Kind::Atom: {
      std::vector<Value> out;
      for (const auto& c : dom.constants(t.atom_name())) out.push_back(Value::atom(t.atom_name(), c));
      return out;
    }
    case Type::Kind::Product: {
      std::vector<Value> out;
      auto ls = enumerate_values(t.left(), dom);
      auto rs = enumerate_values(t.right(), dom);
      for (const auto& l : ls) {
        for (const auto& r : rs) out.push_back(Value::pair(l, r));
      }
      return out;
    }
    case Type::Kind::Closure:
      throw Error(ErrorKind::CombinatorialLimit, "closure-typed variables cannot be enumerated");
  }
  return {};
}

std::vector<Valuation> enumerate_valuations(const Context& ctx, const AtomDomain& dom, std::size_t cap) {
  std::vector<std::vector<Value>> choices;
  std::size_t total = 1;
  for (const auto& b : ctx) {
    choices.push_back(enumerate_values(b.type, dom));
    total *= choices.back().size();
    if (total > cap) {
      throw Error(ErrorKind::CombinatorialLimit,
                  "more than " + std::to_string(cap) + " valuations; shrink the atom domains");
    }
  }
  std::vector<Valuation> out;
  out.reserve(total);
  std::vector<std::size_t> digit(ctx.size(), 0);
  for (std::size_t n = 0; n < total; ++n) {
    Valuation v;
    for (std::size_t i = 0; i < ctx.size(); ++i) v.push_back(ctx[i].name, choices[i][digit[i]]);
    out.push_back(std::move(v));
    for (std::size_t i = ctx.size(); i-- > 0;) {
      if (++digit[i] < choices[i].size()) break;
      digit[i] = 0;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Value equivalence
// ---------------------------------------------------------------------------

namespace {

// Ψ ⊆ Φ0 with names outside Φ0's domain reading 0.
bool included(const DepVector& psi, const DepVector& phi0) {
  return std::all_of(psi.begin(), psi.end(),
                     [&](const DepVector::Entry& e) { return e.dep == Dep::Zero || phi0.get(e.name) == Dep::One; });
}

ValueTypingDerivationPtr typed_or_throw(const Context& ctx, const Value& v, const Type& sigma) {
  try {
    return check_value(ctx, v, sigma);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Internal) throw;
    throw Error(ErrorKind::WitnessNotFound, "value is not well-typed at the compared type: " + e.message());
  }
}

}  // namespace

bool value_equiv(const Context& ctx, const Value& v, const Value& w, const Type& sigma, const DepVector& phi0) {
  switch (sigma.kind()) {
    case Type::Kind::Atom:
      if (!v.is_atom() || !w.is_atom()) {
        throw Error(ErrorKind::WitnessNotFound, "non-atomic value compared at an atomic type");
      }
      return v.constant() == w.constant();
    case Type::Kind::Product:
      if (!v.is_pair() || !w.is_pair()) {
        throw Error(ErrorKind::WitnessNotFound, "non-pair value compared at a product type");
      }
      return value_equiv(ctx, v.first(), w.first(), sigma.left(), phi0) &&
             value_equiv(ctx, v.second(), w.second(), sigma.right(), phi0);
    case Type::Kind::Closure: {
      auto dv = typed_or_throw(ctx, v, sigma);
      auto dw = typed_or_throw(ctx, w, sigma);
      if (!alpha_equal(v.code(), w.code())) return false;
      const auto& cv = v.captured();
      const auto& cw = w.captured();
      if (v.pending() != w.pending() || cv.size() != cw.size()) return false;
      Context inner = ctx.prefix(v.pending().size());
      for (std::size_t i = 0; i < cv.size(); ++i) {
        if (cv[i].name != cw[i].name) return false;
        const Type& ti = dv->captured_types[i];
        if (included(dv->captured_psi[i], phi0) || included(dw->captured_psi[i], phi0)) {
          if (!value_equiv(inner, cv[i].value, cw[i].value, ti, phi0)) return false;
        }
        inner.push_back(cv[i].name, ti);
      }
      return true;
    }
  }
  return false;
}

bool phi_equiv_valuations(const Valuation& a, const Valuation& b, const DepVector& phi0, const Context* ctx) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].name != b[i].name) return false;
    if (phi0.get(a[i].name) == Dep::Zero) continue;
    bool same = ctx ? value_equiv(ctx->prefix(i), a[i].value, b[i].value, (*ctx)[i].type, phi0)
                    : same_value(a[i].value, b[i].value);
    if (!same) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Non-interference
// ---------------------------------------------------------------------------

NonInterferenceReport check_noninterference(const Context& ctx, const Term& e, const AtomDomain& dom,
                                            const NonInterferenceOptions& options) {
  InferResult r = infer(ctx, e);
  NonInterferenceReport rep;
  rep.term = e;
  rep.context = ctx;
  rep.phi = r.phi;
  rep.type = r.type;

  auto vals = enumerate_valuations(ctx, dom, options.max_pairs);
  // Pairs that agree on the Φ0 = 1 variables, grouped by those values.
  std::size_t expected = 0;
  std::vector<std::vector<std::size_t>> groups;
  {
    std::vector<std::pair<std::string, std::size_t>> keyed;
    PrintOptions ascii{true};
    for (std::size_t i = 0; i < vals.size(); ++i) {
      std::string key;
      for (const auto& en : vals[i]) {
        if (r.phi.get(en.name) == Dep::One) key += print_value(en.value, ascii) + "|";
      }
      keyed.emplace_back(key, i);
    }
    std::sort(keyed.begin(), keyed.end());
    for (std::size_t i = 0; i < keyed.size();) {
      std::size_t j = i;
      std::vector<std::size_t> g;
      while (j < keyed.size() && keyed[j].first == keyed[i].first) g.push_back(keyed[j++].second);
      expected += g.size() * g.size();
      groups.push_back(std::move(g));
      i = j;
    }
  }
  if (expected > options.max_pairs) {
    throw Error(ErrorKind::CombinatorialLimit, std::to_string(expected) + " valuation pairs exceed the cap of " +
                                                   std::to_string(options.max_pairs));
  }

  EvalOptions eo;
  eo.typing = ctx;
  eo.max_steps = options.max_steps;
  std::vector<Value> results;
  results.reserve(vals.size());
  for (const auto& v : vals) {
    EvalOptions o = eo;
    results.push_back(eval_open(v, e, o).value);
  }

  for (const auto& g : groups) {
    for (std::size_t i : g) {
      for (std::size_t j : g) {
        if (!phi_equiv_valuations(vals[i], vals[j], r.phi, &ctx)) continue;
        ++rep.pairs_tested;
        std::string reason;
        try {
          if (!value_equiv(ctx, results[i], results[j], r.type, r.phi)) {
            reason = r.type.is_atom() ? "atomic results differ" : "results are not equivalent";
          }
        } catch (const Error& err) {
          if (err.kind() != ErrorKind::WitnessNotFound) throw;
          reason = "result is not well-typed: " + err.message();
        }
        if (!reason.empty()) rep.violations.push_back({vals[i], vals[j], results[i], results[j], reason});
      }
    }
  }
  PrintOptions ascii{true};
  auto key = [&](const Violation& v) {
    return print_valuation(v.left, ascii) + " / " + print_valuation(v.right, ascii);
  };
  std::sort(rep.violations.begin(), rep.violations.end(),
            [&](const Violation& a, const Violation& b) { return key(a) < key(b); });
  return rep;
}

std::string report_text(const NonInterferenceReport& r, const PrintOptions& o) {
  std::string out;
  out += "Non-interference check:\n";
  out += "  " + print_annotated_context(AnnotatedContext(r.context, r.phi), o) + (o.ascii ? " |- " : " ⊢ ") +
         print_term(r.term, o) + "\n";
  out += "    : " + print_type(r.type, o) + "\n";
  out += "  pairs tested: " + std::to_string(r.pairs_tested) + "\n";
  out += "  violations: " + std::to_string(r.violations.size()) + "\n";
  for (const auto& v : r.violations) {
    out += "  violation: " + print_valuation(v.left, o) + " vs " + print_valuation(v.right, o) + " gives " +
           print_value(v.left_value, o) + " vs " + print_value(v.right_value, o) + " (" + v.reason + ")\n";
  }
  out += std::string("  result: ") + (r.holds() ? "holds" : "VIOLATED") + "\n";
  return out;
}

std::string report_json(const NonInterferenceReport& r) {
  using nlohmann::json;
  PrintOptions ascii{true};
  json ctx = json::array();
  for (std::size_t i = 0; i < r.context.size(); ++i) {
    ctx.push_back({{"name", r.context[i].name},
                   {"type", print_type(r.context[i].type, ascii)},
                   {"dep", to_int(r.phi.get(r.context[i].name))}});
  }
  auto valuation = [&](const Valuation& v) {
    json o = json::array();
    for (const auto& e : v) o.push_back({{"name", e.name}, {"value", print_value(e.value, ascii)}});
    return o;
  };
  json vs = json::array();
  for (const auto& v : r.violations) {
    vs.push_back({{"left", valuation(v.left)},
                  {"right", valuation(v.right)},
                  {"left_value", print_value(v.left_value, ascii)},
                  {"right_value", print_value(v.right_value, ascii)},
                  {"reason", v.reason}});
  }
  json out = {{"term", print_term(r.term, ascii)},
              {"context", ctx},
              {"type", print_type(r.type, ascii)},
              {"pairs_tested", r.pairs_tested},
              {"holds", r.holds()},
              {"violations", vs}};
  return out.dump(2);
}

// ---------------------------------------------------------------------------
// Dependency oracle
// ---------------------------------------------------------------------------

std::vector<std::string> semantic_deps_oracle(const Context& ctx, const Term& e, const AtomDomain& dom,
                                              std::size_t cap) {
  InferResult r = infer(ctx, e);
  if (!r.type.is_atom()) {
    throw Error(ErrorKind::TypeMismatch, "the dependency oracle needs an atomic result type");
  }
  auto vals = enumerate_valuations(ctx, dom, cap);
  std::vector<std::size_t> radix, stride(ctx.size(), 1);
  for (const auto& b : ctx) radix.push_back(enumerate_values(b.type, dom).size());
  for (std::size_t i = ctx.size(); i-- > 1;) stride[i - 1] = stride[i] * radix[i];

  std::vector<std::string> results;
  for (const auto& v : vals) {
    ClassicValue w = eval_classic(classic_env_of(v), e).value;
    if (w.kind() != ClassicValue::Kind::Atom) internal_error("atomic-typed term produced a non-atom");
    results.push_back(w.constant());
  }
  std::vector<std::string> out;
  for (std::size_t k = 0; k < ctx.size(); ++k) {
    bool found = false;
    for (std::size_t idx = 0; idx < vals.size() && !found; ++idx) {
      std::size_t cur = (idx / stride[k]) % radix[k];
      for (std::size_t alt = 0; alt < radix[k] && !found; ++alt) {
        if (alt == cur) continue;
        std::size_t other = idx - cur * stride[k] + alt * stride[k];
        found = results[idx] != results[other];
      }
    }
    if (found) out.push_back(ctx[k].name);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Term generation
// ---------------------------------------------------------------------------

namespace {

struct Retry {};

class Generator {
 public:
  Generator(std::uint64_t seed, const GenOptions& o, const Context& base) : rng_(seed), opts_(o) {
    for (const auto& b : base) used_.insert(b.name);
  }

  Term any(const Context& g, int depth) {
    enum Rule { Var, Pair, Proj, Lam, Let, App, Fix };
    std::vector<std::pair<Rule, int>> rules;
    if (!g.empty()) rules.push_back({Var, 2});
    rules.push_back({Lam, 2});
    if (depth > 1) {
      rules.push_back({Pair, 2});
      rules.push_back({Proj, 1});
      rules.push_back({Let, 3});
      rules.push_back({App, 3});
      if (opts_.allow_fix) rules.push_back({Fix, 1});
    }
    switch (pick(rules)) {
      case Var:
        return Term::var(g[index(g.size())].name);
      case Pair:
        return Term::pair(any(g, depth - 1), any(g, depth - 1));
      case Proj:
        return proj(g, depth);
      case Lam: {
        std::string x = fresh();
        Type s = pick_type(g);
        Term body = depth > 1 ? any(g.extended(x, s), depth - 1) : Term::var(x);
        return Term::lam(x, s, body);
      }
      case Let: {
        std::string x = fresh();
        Term d = any(g, depth - 1);
        Type t = type_of(g, d);
        return Term::let(x, d, any(g.extended(x, t), depth - 1));
      }
      case App:
        return app(g, depth);
      case Fix:
        return fix(g, depth);
    }
    throw Retry{};
  }

  std::optional<Term> of_type(const Context& g, const Type& t, int depth) {
    std::vector<std::size_t> vars;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (alpha_equal(g[i].type, t)) vars.push_back(i);
    }
    if (depth > 1 && chance(0.3)) {
      std::string x = fresh();
      Term d = any(g, depth - 1);
      Type dt = type_of(g, d);
      if (auto b = of_type(g.extended(x, dt), t, depth - 1)) return Term::let(x, d, *b);
    }
    if (!vars.empty() && (depth == 1 || chance(0.6))) return Term::var(g[vars[index(vars.size())]].name);
    if (t.is_product() && depth > 1) {
      auto l = of_type(g, t.left(), depth - 1);
      auto r = of_type(g, t.right(), depth - 1);
      if (l && r) return Term::pair(*l, *r);
    }
    if (depth > 1) {
      // project out of a variable holding a pair
      for (std::size_t i = 0; i < g.size(); ++i) {
        const Type& gt = g[i].type;
        if (!gt.is_product()) continue;
        if (alpha_equal(gt.left(), t)) return Term::proj(1, Term::var(g[i].name));
        if (alpha_equal(gt.right(), t)) return Term::proj(2, Term::var(g[i].name));
      }
    }
    if (!vars.empty()) return Term::var(g[vars[index(vars.size())]].name);
    return std::nullopt;
  }

 private:
  template <class R>
  R pick(const std::vector<std::pair<R, int>>& ws) {
    int total = 0;
    for (const auto& w : ws) total += w.second;
    int r = std::uniform_int_distribution<int>(0, total - 1)(rng_);
    for (const auto& w : ws) {
      if (r < w.second) return w.first;
      r -= w.second;
    }
    return ws.back().first;
  }

  std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }

  std::string fresh() {
    for (;;) {
      std::string n = "x" + std::to_string(counter_++);
      if (used_.insert(n).second) return n;
    }
  }

  static Type type_of(const Context& g, const Term& t) {
    try {
      InferOptions o;
      o.check_context = false;
      return infer(g, t, o).type;
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::Internal) throw;
      throw Retry{};
    }
  }

  Type pick_type(const Context& g) {
    std::vector<Type> pool;
    std::set<std::string> atoms;
    for (const auto& b : g) {
      if (b.type.is_atom() && atoms.insert(b.type.atom_name()).second) pool.push_back(b.type);
    }
    if (pool.empty()) pool.push_back(Type::atom("al"));
    if (chance(0.15)) return Type::product(pool[index(pool.size())], pool[index(pool.size())]);
    if (chance(0.15)) {
      std::vector<Type> fns;
      for (const auto& b : g) {
        if (b.type.is_closure()) fns.push_back(b.type);
      }
      if (!fns.empty()) return fns[index(fns.size())];
    }
    return pool[index(pool.size())];
  }

  Term proj(const Context& g, int depth) {
    Term t = any(g, depth - 1);
    if (type_of(g, t).is_product()) return Term::proj(chance(0.5) ? 1 : 2, t);
    std::vector<std::size_t> pairs;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (g[i].type.is_product()) pairs.push_back(i);
    }
    if (!pairs.empty()) return Term::proj(chance(0.5) ? 1 : 2, Term::var(g[pairs[index(pairs.size())]].name));
    return Term::proj(chance(0.5) ? 1 : 2, Term::pair(t, any(g, depth - 2 > 0 ? depth - 2 : 1)));
  }

  std::optional<Term> call(const Context& g, const Term& f, const Type& ft, int depth) {
    if (!ft.is_closure()) return std::nullopt;
    auto arg = of_type(g, ft.closure().param_type, depth - 1);
    if (!arg) return std::nullopt;
    return Term::app(f, *arg);
  }

  Term app(const Context& g, int depth) {
    std::vector<std::size_t> fns;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (g[i].type.is_closure()) fns.push_back(i);
    }
    if (!fns.empty() && chance(0.5)) {
      std::size_t i = fns[index(fns.size())];
      if (auto t = call(g, Term::var(g[i].name), g[i].type, depth)) return *t;
    }
    if (chance(0.4)) {
      Term f = any(g, depth - 1);
      if (auto t = call(g, f, type_of(g, f), depth)) return *t;
    }
    // (λ(x:τ) body) u
    Term u = any(g, depth - 1);
    Type tu = type_of(g, u);
    std::string x = fresh();
    Term body = depth > 2 ? any(g.extended(x, tu), depth - 2) : Term::var(x);
    return Term::app(Term::lam(x, tu, body), u);
  }

  Term fix(const Context& g, int depth) {
    std::string f = fresh(), x = fresh();
    Type s = pick_type(g);
    std::vector<Type> atoms;
    for (const auto& b : g) {
      if (b.type.is_atom()) atoms.push_back(b.type);
    }
    if (s.is_atom()) atoms.push_back(s);
    if (atoms.empty()) throw Retry{};
    Type t = atoms[index(atoms.size())];
    // body without recursive calls: the language has no conditionals
    auto body = of_type(g.extended(x, s), t, depth - 1);
    if (!body) throw Retry{};
    Term fx = Term::fix(f, x, s, t, *body);
    auto arg = of_type(g, s, depth - 1);
    if (arg && chance(0.7)) return Term::app(fx, *arg);
    return fx;
  }

  std::mt19937_64 rng_;
  GenOptions opts_;
  std::set<std::string> used_;
  int counter_ = 0;
};

}  // namespace

Term gen_typed_term(const Context& ctx, const std::optional<Type>& target, int depth, std::uint64_t seed,
                    const GenOptions& options) {
  if (depth < 1) internal_error("generation depth must be at least 1");
  for (int attempt = 0; attempt < options.max_retries; ++attempt) {
    Generator gen(seed * 1000003u + static_cast<std::uint64_t>(attempt), options, ctx);
    try {
      std::optional<Term> t;
      if (target) {
        t = gen.of_type(ctx, *target, depth);
      } else {
        t = gen.any(ctx, depth);
      }
      if (!t) continue;
      InferResult r = infer(ctx, *t);
      if (target && !alpha_equal(r.type, *target)) continue;
      return *t;
    } catch (const Retry&) {
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::Internal) throw;
    }
  }
  throw Error(ErrorKind::GenerationExhausted,
              "no well-typed term found after " + std::to_string(options.max_retries) + " attempts");
}

}  // namespace occ
