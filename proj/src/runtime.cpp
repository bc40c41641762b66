#include "occ/runtime.hpp"

#include <algorithm>

#include "occ/scope.hpp"

namespace occ {

// ---------------------------------------------------------------------------
// Values
// ---------------------------------------------------------------------------

Value Value::atom(std::string atom_type, std::string constant) {
  auto n = std::make_shared<ValueNode>();
  n->kind = Kind::Atom;
  n->atom_type = std::move(atom_type);
  n->constant = std::move(constant);
  return Value(std::move(n));
}

Value Value::pair(Value first, Value second) {
  auto n = std::make_shared<ValueNode>();
  n->kind = Kind::Pair;
  n->first = std::move(first);
  n->second = std::move(second);
  return Value(std::move(n));
}

Value Value::closure(std::vector<std::string> pending, std::vector<Captured> captured, Term code) {
  if (code.kind() != Term::Kind::Lam && code.kind() != Term::Kind::Fix) {
    internal_error("closure code must be a lambda or a fix");
  }
  auto n = std::make_shared<ValueNode>();
  n->kind = Kind::Closure;
  n->pending = std::move(pending);
  n->captured = std::move(captured);
  n->code = std::move(code);
  return Value(std::move(n));
}

Value::Kind Value::kind() const {
  if (!node_) internal_error("use of an empty value");
  return node_->kind;
}

const std::string& Value::atom_type() const {
  if (kind() != Kind::Atom) internal_error("atom_type on a non-atom value");
  return node_->atom_type;
}
const std::string& Value::constant() const {
  if (kind() != Kind::Atom) internal_error("constant on a non-atom value");
  return node_->constant;
}
const Value& Value::first() const {
  if (kind() != Kind::Pair) internal_error("first on a non-pair value");
  return node_->first;
}
const Value& Value::second() const {
  if (kind() != Kind::Pair) internal_error("second on a non-pair value");
  return node_->second;
}
const std::vector<std::string>& Value::pending() const {
  if (kind() != Kind::Closure) internal_error("pending on a non-closure value");
  return node_->pending;
}
const std::vector<Captured>& Value::captured() const {
  if (kind() != Kind::Closure) internal_error("captured on a non-closure value");
  return node_->captured;
}
const Term& Value::code() const {
  if (kind() != Kind::Closure) internal_error("code on a non-closure value");
  return node_->code;
}

bool same_value(const Value& a, const Value& b) {
  if (a.node() == b.node()) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Value::Kind::Atom:
      return a.atom_type() == b.atom_type() && a.constant() == b.constant();
    case Value::Kind::Pair:
      return same_value(a.first(), b.first()) && same_value(a.second(), b.second());
    case Value::Kind::Closure: {
      if (a.pending() != b.pending() || a.captured().size() != b.captured().size()) return false;
      for (std::size_t i = 0; i < a.captured().size(); ++i) {
        if (a.captured()[i].name != b.captured()[i].name) return false;
        if (!same_value(a.captured()[i].value, b.captured()[i].value)) return false;
      }
      return alpha_equal(a.code(), b.code());
    }
  }
  return false;
}

std::vector<std::string> Valuation::names() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.name);
  return out;
}

const Value* Valuation::find(std::string_view name) const {
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
    if (it->name == name) return &it->value;
  }
  return nullptr;
}

Valuation Valuation::prefix(std::size_t n) const {
  n = std::min(n, entries_.size());
  return Valuation(std::vector<Entry>(entries_.begin(), entries_.begin() + static_cast<std::ptrdiff_t>(n)));
}

Valuation Valuation::extended(std::string name, Value v) const {
  Valuation out = *this;
  out.entries_.push_back({std::move(name), std::move(v)});
  return out;
}

void Valuation::push_back(std::string name, Value v) { entries_.push_back({std::move(name), std::move(v)}); }

// ---------------------------------------------------------------------------
// Value substitution
// ---------------------------------------------------------------------------

Value subst_value(const Value& w, const std::string& y, const Value& v, const std::optional<Witness>& witness) {
  switch (w.kind()) {
    case Value::Kind::Atom:
      return w;
    case Value::Kind::Pair: {
      Value a = subst_value(w.first(), y, v, witness);
      Value b = subst_value(w.second(), y, v, witness);
      if (a.node() == w.first().node() && b.node() == w.second().node()) return w;
      return Value::pair(std::move(a), std::move(b));
    }
    case Value::Kind::Closure: {
      const auto& pending = w.pending();
      auto it = std::find(pending.begin(), pending.end(), y);
      if (it == pending.end()) return w;
      if (it + 1 != pending.end()) {
        throw Error(ErrorKind::MalformedPending,
                    "cannot capture " + y + ": it is pending but not the last pending variable")
            .with_subject(y);
      }
      std::vector<std::string> rest(pending.begin(), pending.end() - 1);
      std::vector<Captured> captured;
      captured.reserve(w.captured().size() + 1);
      captured.push_back(Captured{y, v, witness});
      captured.insert(captured.end(), w.captured().begin(), w.captured().end());
      return Value::closure(std::move(rest), std::move(captured), w.code());
    }
  }
  return w;
}

// ---------------------------------------------------------------------------
// Value typing
// ---------------------------------------------------------------------------

namespace {

[[noreturn]] void mismatch(const std::string& msg) { throw Error(ErrorKind::ValueTypeMismatch, msg); }

// Re-indexes a recorded dependency vector over `names`; names the vector does
// not know read as 0. Returns nothing if it marks a name outside `names`.
std::optional<DepVector> align(const DepVector& psi, const std::vector<std::string>& names) {
  DepVector out = DepVector::zeros(names);
  for (const auto& e : psi) {
    if (std::find(names.begin(), names.end(), e.name) == names.end()) {
      if (e.dep == Dep::One) return std::nullopt;
      continue;
    }
    if (e.dep == Dep::One) out.set(e.name, Dep::One);
  }
  return out;
}

class ValueChecker {
 public:
  explicit ValueChecker(const ValueCheckOptions& o) : opts_(o) {}

  ValueTypingDerivationPtr check(const Context& ctx, const Value& v, const Type& sigma) {
    auto d = std::make_shared<ValueTypingDerivation>();
    d->context = ctx;
    d->value = v;
    d->type = sigma;
    switch (v.kind()) {
      case Value::Kind::Atom:
        d->rule = "Value-Atom";
        if (!sigma.is_atom() || sigma.atom_name() != v.atom_type()) {
          mismatch("constant " + v.constant() + " of " + v.atom_type() + " does not have the expected type");
        }
        return d;
      case Value::Kind::Pair:
        d->rule = "Value-Product";
        if (!sigma.is_product()) mismatch("pair value where a non-product type is expected");
        d->premises = {step(ctx, v.first(), sigma.left(), "Value-Product(left)"),
                       step(ctx, v.second(), sigma.right(), "Value-Product(right)")};
        return d;
      case Value::Kind::Closure:
        return closure(ctx, v, sigma);
    }
    return d;
  }

  // A type for `v` built from its recorded witnesses (all-one annotations
  // where none were recorded).
  Type synthesize(const Context& ctx, const Value& v) {
    switch (v.kind()) {
      case Value::Kind::Atom:
        return Type::atom(v.atom_type());
      case Value::Kind::Pair:
        return Type::product(synthesize(ctx, v.first()), synthesize(ctx, v.second()));
      case Value::Kind::Closure: {
        Context gp = pending_prefix(ctx, v);
        std::vector<Type> types;
        std::vector<DepVector> psis;
        Context inner = gp;
        for (const auto& c : v.captured()) {
          Type t = c.witness ? c.witness->type : synthesize(inner, c.value);
          std::optional<DepVector> psi;
          if (c.witness) psi = align(c.witness->psi, inner.names());
          if (!psi) {
            psi = DepVector::zeros(inner);
            for (const auto& n : inner.names()) psi->set(n, Dep::One);
          }
          types.push_back(t);
          psis.push_back(*psi);
          inner.push_back(c.name, t);
        }
        return close_over(gp, v, types, psis, nullptr).type;
      }
    }
    internal_error("unknown value kind");
  }

 private:
  struct Closed {
    Type type;
    TypingDerivationPtr body;
    std::vector<SubstDerivationPtr> substs;
  };

  ValueTypingDerivationPtr step(const Context& ctx, const Value& v, const Type& sigma, const std::string& label) {
    try {
      return check(ctx, v, sigma);
    } catch (Error& e) {
      e.push_path(label);
      throw;
    }
  }

  static Context pending_prefix(const Context& ctx, const Value& v) {
    const auto& pending = v.pending();
    if (pending.size() > ctx.size()) mismatch("closure has more pending variables than the context binds");
    for (std::size_t i = 0; i < pending.size(); ++i) {
      if (ctx[i].name != pending[i]) {
        mismatch("pending variables of the closure are not a prefix of the context (at " + pending[i] + ")");
      }
    }
    return ctx.prefix(pending.size());
  }

  // Types the code in Γ_P, (x_i : τ_i) and substitutes x_n ... x_1 away.
  Closed close_over(const Context& gp, const Value& v, const std::vector<Type>& types,
                    const std::vector<DepVector>& psis, std::vector<ValueTypingDerivationPtr>* premises) {
    const auto& caps = v.captured();
    Context inner = gp;
    for (std::size_t i = 0; i < caps.size(); ++i) {
      if (premises) {
        premises->push_back(step(inner, caps[i].value, types[i], "Value-Closure(captured " + caps[i].name + ")"));
      }
      inner.push_back(caps[i].name, types[i]);
    }
    Closed out;
    try {
      InferOptions o;
      o.weaken_annotations = true;
      InferResult r = infer(inner, v.code(), o);
      out.type = r.type;
      out.body = r.derivation;
    } catch (Error& e) {
      if (e.kind() == ErrorKind::Internal) throw;
      mismatch("closure code does not type-check in its captured context: " + e.message());
    }
    for (std::size_t i = caps.size(); i-- > 0;) {
      Context before = inner.prefix(gp.size() + i);
      try {
        TypeSubst s = subst_type(before, caps[i].name, types[i], Context{}, out.type, psis[i]);
        out.type = s.type;
        out.substs.push_back(s.derivation);
      } catch (Error& e) {
        if (e.kind() == ErrorKind::Internal) throw;
        mismatch("substituting captured " + caps[i].name + " failed: " + e.message());
      }
    }
    return out;
  }

  ValueTypingDerivationPtr closure(const Context& ctx, const Value& v, const Type& sigma) {
    if (!sigma.is_closure()) mismatch("closure value where a non-closure type is expected");
    const ClosureData& c = sigma.closure();
    Context gp = pending_prefix(ctx, v);
    if (gp.names() != c.captured.context.names()) {
      mismatch("pending variables of the closure differ from the context captured by its type");
    }
    const auto& caps = v.captured();
    const bool recorded =
        std::all_of(caps.begin(), caps.end(), [](const Captured& k) { return k.witness.has_value(); });

    auto attempt = [&](const std::vector<Type>& types, const std::vector<DepVector>& psis) {
      auto d = std::make_shared<ValueTypingDerivation>();
      d->rule = v.code().kind() == Term::Kind::Fix ? "Value-Closure-Fix" : "Value-Closure";
      d->context = ctx;
      d->value = v;
      d->type = sigma;
      Closed closed = close_over(gp, v, types, psis, &d->premises);
      if (!alpha_equal(closed.type, sigma)) {
        mismatch("closure value does not have the expected closure type");
      }
      d->captured_types = types;
      d->captured_psi = psis;
      d->body = closed.body;
      d->substitutions = std::move(closed.substs);
      d->witnesses_recorded = recorded;
      return d;
    };

    if (recorded) {
      std::vector<Type> types;
      std::vector<DepVector> psis;
      Context inner = gp;
      for (const auto& k : caps) {
        auto psi = align(k.witness->psi, inner.names());
        if (!psi) mismatch("recorded dependencies of " + k.name + " mention variables outside its context");
        types.push_back(k.witness->type);
        psis.push_back(*psi);
        inner.push_back(k.name, k.witness->type);
      }
      return attempt(types, psis);
    }

    // Search over the annotations of the captured values.
    std::vector<Type> types;
    std::size_t bits = 0;
    {
      Context inner = gp;
      for (std::size_t i = 0; i < caps.size(); ++i) {
        Type t = caps[i].witness ? caps[i].witness->type : synthesize(inner, caps[i].value);
        types.push_back(t);
        bits += inner.size();
        inner.push_back(caps[i].name, t);
      }
    }
    if (bits > opts_.max_search_bits) {
      throw Error(ErrorKind::WitnessNotFound, "closure annotation search needs " + std::to_string(bits) +
                                                  " bits, more than the configured limit of " +
                                                  std::to_string(opts_.max_search_bits));
    }
    std::string last;
    for (unsigned long mask = 0; mask < (1ul << bits); ++mask) {
      std::vector<DepVector> psis;
      std::size_t bit = 0;
      for (std::size_t i = 0; i < caps.size(); ++i) {
        DepVector p;
        for (std::size_t j = 0; j < gp.size() + i; ++j, ++bit) {
          const std::string& n = j < gp.size() ? gp[j].name : caps[j - gp.size()].name;
          p.push_back(n, dep_of(mask & (1ul << bit)));
        }
        psis.push_back(p);
      }
      try {
        return attempt(types, psis);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::ValueTypeMismatch) throw;
        last = e.message();
      }
    }
    mismatch("no annotation of the captured values gives the closure its expected type" +
             (last.empty() ? std::string() : " (" + last + ")"));
  }

  ValueCheckOptions opts_;
};

}  // namespace

ValueTypingDerivationPtr check_value(const Context& ctx, const Value& v, const Type& sigma,
                                     const ValueCheckOptions& options) {
  ValueChecker checker(options);
  return checker.check(ctx, v, sigma);
}

bool value_has_type(const Context& ctx, const Value& v, const Type& sigma) {
  try {
    check_value(ctx, v, sigma);
    return true;
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Internal) throw;
    return false;
  }
}

bool check_valuation(const Valuation& vals, const Context& ctx, std::string* diagnostic) {
  auto fail_with = [&](const std::string& msg) {
    if (diagnostic) *diagnostic = msg;
    return false;
  };
  if (vals.size() != ctx.size()) return fail_with("valuation and context have different lengths");
  if (!well_scoped(ctx)) return fail_with("context is not well-scoped");
  for (std::size_t i = 0; i < ctx.size(); ++i) {
    if (vals[i].name != ctx[i].name) {
      return fail_with("valuation binds " + vals[i].name + " where the context binds " + ctx[i].name);
    }
    try {
      check_value(ctx.prefix(i), vals[i].value, ctx[i].type);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::Internal) throw;
      return fail_with("value of " + ctx[i].name + ": " + e.message());
    }
  }
  return true;
}

}  // namespace occ
