#include "occ/syntax.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <unordered_set>

namespace occ {

// ---------------------------------------------------------------------------
// DepVector
// ---------------------------------------------------------------------------

DepVector::DepVector(std::vector<Entry> entries) : entries_(std::move(entries)) {}

DepVector DepVector::zeros(const Context& ctx) { return zeros(ctx.names()); }

DepVector DepVector::zeros(const std::vector<std::string>& names) {
  DepVector v;
  v.entries_.reserve(names.size());
  for (const auto& n : names) v.entries_.push_back({n, Dep::Zero});
  return v;
}

DepVector DepVector::unit(const Context& ctx, std::string_view name) {
  DepVector v = zeros(ctx);
  auto idx = ctx.find(name);
  if (!idx) internal_error("unit dependency on unbound name " + std::string(name));
  v.entries_[*idx].dep = Dep::One;
  return v;
}

std::vector<std::string> DepVector::domain() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.name);
  return out;
}

bool DepVector::has(std::string_view name) const {
  return std::any_of(entries_.begin(), entries_.end(), [&](const Entry& e) { return e.name == name; });
}

Dep DepVector::get(std::string_view name) const {
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
    if (it->name == name) return it->dep;
  }
  return Dep::Zero;
}

Dep DepVector::at(std::string_view name) const {
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
    if (it->name == name) return it->dep;
  }
  internal_error("dependency vector has no entry for " + std::string(name));
}

void DepVector::set(std::string_view name, Dep dep) {
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
    if (it->name == name) {
      it->dep = dep;
      return;
    }
  }
  internal_error("dependency vector has no entry for " + std::string(name));
}

void DepVector::push_back(std::string name, Dep dep) { entries_.push_back({std::move(name), dep}); }

DepVector DepVector::prefix(std::size_t n) const {
  n = std::min(n, entries_.size());
  return DepVector(std::vector<Entry>(entries_.begin(), entries_.begin() + static_cast<std::ptrdiff_t>(n)));
}

DepVector DepVector::zero_extend(const Context& ctx) const { return zero_extend(ctx.names()); }

DepVector DepVector::zero_extend(const std::vector<std::string>& names) const {
  DepVector out = zeros(names);
  for (const auto& e : entries_) {
    auto it = std::find(names.begin(), names.end(), e.name);
    if (it == names.end()) {
      internal_error("cannot zero-extend: " + e.name + " is not in the target domain");
    }
    out.entries_[static_cast<std::size_t>(it - names.begin())].dep = e.dep;
  }
  return out;
}

bool DepVector::all_zero() const {
  return std::all_of(entries_.begin(), entries_.end(), [](const Entry& e) { return e.dep == Dep::Zero; });
}

bool DepVector::subset_of(const DepVector& other) const {
  for (const auto& e : entries_) {
    if (e.dep == Dep::One && other.get(e.name) != Dep::One) return false;
  }
  return true;
}

bool DepVector::same_domain(const DepVector& other) const {
  if (entries_.size() != other.entries_.size()) return false;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].name != other.entries_[i].name) return false;
  }
  return true;
}

DepVector dep_sum(const DepVector& a, const DepVector& b) {
  if (!a.same_domain(b)) internal_error("dep_sum: dependency vectors range over different domains");
  std::vector<DepVector::Entry> out;
  out.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out.push_back({a[i].name, dep_or(a[i].dep, b[i].dep)});
  return DepVector(std::move(out));
}

DepVector dep_scale(Dep phi, const DepVector& v) {
  std::vector<DepVector::Entry> out;
  out.reserve(v.size());
  for (const auto& e : v) out.push_back({e.name, dep_and(phi, e.dep)});
  return DepVector(std::move(out));
}

// ---------------------------------------------------------------------------
// Type
// ---------------------------------------------------------------------------

Type Type::atom(std::string name) {
  auto n = std::make_shared<TypeNode>();
  n->kind = Kind::Atom;
  n->atom = std::move(name);
  return Type(std::move(n));
}

Type Type::product(Type left, Type right) {
  auto n = std::make_shared<TypeNode>();
  n->kind = Kind::Product;
  n->left = std::move(left);
  n->right = std::move(right);
  return Type(std::move(n));
}

Type Type::closure(ClosureData data) {
  if (!data.captured.deps.same_domain(DepVector::zeros(data.captured.context))) {
    internal_error("closure type: annotation domain differs from captured context");
  }
  auto n = std::make_shared<TypeNode>();
  n->kind = Kind::Closure;
  n->closure = std::make_shared<const ClosureData>(std::move(data));
  return Type(std::move(n));
}

Type::Kind Type::kind() const {
  if (!node_) internal_error("use of an empty type");
  return node_->kind;
}

const std::string& Type::atom_name() const {
  if (kind() != Kind::Atom) internal_error("atom_name on a non-atom type");
  return node_->atom;
}

const Type& Type::left() const {
  if (kind() != Kind::Product) internal_error("left on a non-product type");
  return node_->left;
}

const Type& Type::right() const {
  if (kind() != Kind::Product) internal_error("right on a non-product type");
  return node_->right;
}

const ClosureData& Type::closure() const {
  if (kind() != Kind::Closure) internal_error("closure on a non-closure type");
  return *node_->closure;
}

// ---------------------------------------------------------------------------
// Context
// ---------------------------------------------------------------------------

std::vector<std::string> Context::names() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& b : entries_) out.push_back(b.name);
  return out;
}

std::optional<std::size_t> Context::find(std::string_view name) const {
  for (std::size_t i = entries_.size(); i-- > 0;) {
    if (entries_[i].name == name) return i;
  }
  return std::nullopt;
}

const Type& Context::type_of(std::string_view name) const {
  auto idx = find(name);
  if (!idx) fail(ErrorKind::UnboundVariable, "unbound variable " + std::string(name));
  return entries_[*idx].type;
}

Context Context::prefix(std::size_t n) const {
  n = std::min(n, entries_.size());
  return Context(std::vector<Binding>(entries_.begin(), entries_.begin() + static_cast<std::ptrdiff_t>(n)));
}

Context Context::suffix(std::size_t from) const {
  from = std::min(from, entries_.size());
  return Context(std::vector<Binding>(entries_.begin() + static_cast<std::ptrdiff_t>(from), entries_.end()));
}

Context Context::extended(std::string name, Type type) const {
  Context out = *this;
  out.entries_.push_back({std::move(name), std::move(type)});
  return out;
}

Context Context::concat(const Context& tail) const {
  Context out = *this;
  out.entries_.insert(out.entries_.end(), tail.entries_.begin(), tail.entries_.end());
  return out;
}

void Context::push_back(std::string name, Type type) { entries_.push_back({std::move(name), std::move(type)}); }

AnnotatedContext::AnnotatedContext(Context ctx, DepVector d) : context(std::move(ctx)), deps(std::move(d)) {
  if (deps.size() != context.size()) internal_error("annotated context: annotation and context lengths differ");
  for (std::size_t i = 0; i < context.size(); ++i) {
    if (deps[i].name != context[i].name) internal_error("annotated context: annotation domain out of order");
  }
}

// ---------------------------------------------------------------------------
// Alpha-equivalence
// ---------------------------------------------------------------------------

namespace {

// Pairs of binder names currently in scope, innermost last.
using Renaming = std::vector<std::pair<std::string, std::string>>;

bool same_name(const Renaming& r, const std::string& a, const std::string& b) {
  for (auto it = r.rbegin(); it != r.rend(); ++it) {
    if (it->first == a || it->second == b) return it->first == a && it->second == b;
  }
  return a == b;
}

bool alpha_type(const Type& a, const Type& b, Renaming& r);

bool alpha_context(const Context& a, const Context& b, Renaming& r) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!same_name(r, a[i].name, b[i].name)) return false;
    if (!alpha_type(a[i].type, b[i].type, r)) return false;
  }
  return true;
}

bool alpha_type(const Type& a, const Type& b, Renaming& r) {
  if (a.node() == b.node() && r.empty()) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Type::Kind::Atom:
      return a.atom_name() == b.atom_name();
    case Type::Kind::Product:
      return alpha_type(a.left(), b.left(), r) && alpha_type(a.right(), b.right(), r);
    case Type::Kind::Closure: {
      const auto& ca = a.closure();
      const auto& cb = b.closure();
      if (!alpha_context(ca.captured.context, cb.captured.context, r)) return false;
      for (std::size_t i = 0; i < ca.captured.deps.size(); ++i) {
        if (ca.captured.deps[i].dep != cb.captured.deps[i].dep) return false;
      }
      if (ca.param_dep != cb.param_dep) return false;
      if (!alpha_type(ca.param_type, cb.param_type, r)) return false;
      r.emplace_back(ca.param, cb.param);
      bool ok = alpha_type(ca.result, cb.result, r);
      r.pop_back();
      return ok;
    }
  }
  return false;
}

bool alpha_term(const Term& a, const Term& b, Renaming& r) {
  if (a.node() == b.node() && r.empty()) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Term::Kind::Var:
      return same_name(r, a.name(), b.name());
    case Term::Kind::Pair:
    case Term::Kind::App:
      return alpha_term(a.first(), b.first(), r) && alpha_term(a.second(), b.second(), r);
    case Term::Kind::Proj:
      return a.index() == b.index() && alpha_term(a.first(), b.first(), r);
    case Term::Kind::Lam: {
      if (!alpha_type(a.param_type(), b.param_type(), r)) return false;
      r.emplace_back(a.name(), b.name());
      bool ok = alpha_term(a.body(), b.body(), r);
      r.pop_back();
      return ok;
    }
    case Term::Kind::Fix: {
      if (!alpha_type(a.param_type(), b.param_type(), r)) return false;
      r.emplace_back(a.name(), b.name());
      bool ok = alpha_type(a.result_type(), b.result_type(), r);
      r.pop_back();
      if (!ok) return false;
      r.emplace_back(a.fname(), b.fname());
      r.emplace_back(a.name(), b.name());
      ok = alpha_term(a.body(), b.body(), r);
      r.pop_back();
      r.pop_back();
      return ok;
    }
    case Term::Kind::Let: {
      if (!alpha_term(a.first(), b.first(), r)) return false;
      r.emplace_back(a.name(), b.name());
      bool ok = alpha_term(a.second(), b.second(), r);
      r.pop_back();
      return ok;
    }
  }
  return false;
}

}  // namespace

bool alpha_equal(const Type& a, const Type& b) {
  Renaming r;
  return alpha_type(a, b, r);
}

bool alpha_equal(const Context& a, const Context& b) {
  Renaming r;
  return alpha_context(a, b, r);
}

bool alpha_equal(const AnnotatedContext& a, const AnnotatedContext& b) {
  return alpha_equal(a.context, b.context) && a.deps == b.deps;
}

bool alpha_equal(const Term& a, const Term& b) {
  Renaming r;
  return alpha_term(a, b, r);
}

// ---------------------------------------------------------------------------
// Renaming and weakening
// ---------------------------------------------------------------------------

bool mentions(const Type& t, std::string_view name) {
  switch (t.kind()) {
    case Type::Kind::Atom:
      return false;
    case Type::Kind::Product:
      return mentions(t.left(), name) || mentions(t.right(), name);
    case Type::Kind::Closure: {
      const auto& c = t.closure();
      for (const auto& b : c.captured.context) {
        if (b.name == name || mentions(b.type, name)) return true;
      }
      if (mentions(c.param_type, name)) return true;
      return c.param != name && mentions(c.result, name);
    }
  }
  return false;
}

Type rename_free(const Type& t, std::string_view from, std::string_view to) {
  if (from == to) return t;
  switch (t.kind()) {
    case Type::Kind::Atom:
      return t;
    case Type::Kind::Product:
      return Type::product(rename_free(t.left(), from, to), rename_free(t.right(), from, to));
    case Type::Kind::Closure: {
      ClosureData c = t.closure();
      Context ctx;
      DepVector deps;
      for (std::size_t i = 0; i < c.captured.size(); ++i) {
        const auto& b = c.captured.context[i];
        std::string n = b.name == from ? std::string(to) : b.name;
        ctx.push_back(n, rename_free(b.type, from, to));
        deps.push_back(n, c.captured.deps[i].dep);
      }
      c.captured = AnnotatedContext(std::move(ctx), std::move(deps));
      c.param_type = rename_free(c.param_type, from, to);
      if (c.param == from) return Type::closure(std::move(c));
      if (c.param == to) {
        std::string p = fresh_name(c.param);
        c.result = rename_free(c.result, c.param, p);
        c.param = std::move(p);
      }
      c.result = rename_free(c.result, from, to);
      return Type::closure(std::move(c));
    }
  }
  return t;
}

Type rename_param(const Type& closure_type, std::string new_param) {
  ClosureData c = closure_type.closure();
  if (c.param == new_param) return closure_type;
  c.result = rename_free(c.result, c.param, new_param);
  c.param = std::move(new_param);
  return Type::closure(std::move(c));
}

Type weaken_to(const Context& ambient, const Type& t) {
  switch (t.kind()) {
    case Type::Kind::Atom:
      return t;
    case Type::Kind::Product: {
      Type l = weaken_to(ambient, t.left());
      Type r = weaken_to(ambient, t.right());
      if (l.node() == t.left().node() && r.node() == t.right().node()) return t;
      return Type::product(std::move(l), std::move(r));
    }
    case Type::Kind::Closure: {
      const ClosureData& c = t.closure();
      Context scope;
      DepVector deps;
      if (!c.captured.empty()) {
        const std::string& last = c.captured.context[c.captured.size() - 1].name;
        auto k = ambient.find(last);
        if (!k) {
          throw Error(ErrorKind::IllScoped, "captured variable " + last + " is not bound in the context")
              .with_subject(last);
        }
        scope = ambient.prefix(*k + 1);
        std::size_t j = 0;
        for (const auto& b : scope) {
          if (j < c.captured.size() && c.captured.context[j].name == b.name) {
            deps.push_back(b.name, c.captured.deps[j].dep);
            ++j;
          } else {
            deps.push_back(b.name, Dep::Zero);
          }
        }
        if (j != c.captured.size()) {
          const std::string& bad = c.captured.context[j].name;
          throw Error(ErrorKind::NotPrefix,
                      "captured context does not follow the order of the ambient context at " + bad)
              .with_subject(bad);
        }
      }
      ClosureData out;
      out.captured = AnnotatedContext(scope, std::move(deps));
      out.param = c.param;
      out.param_dep = c.param_dep;
      out.param_type = weaken_to(scope, c.param_type);
      Type result = c.result;
      if (scope.contains(out.param)) {
        std::string p = fresh_name(out.param);
        result = rename_free(result, out.param, p);
        out.param = std::move(p);
      }
      out.result = weaken_to(scope.extended(out.param, out.param_type), result);
      Type w = Type::closure(std::move(out));
      return alpha_equal(w, t) ? t : w;
    }
  }
  return t;
}

// ---------------------------------------------------------------------------
// Term
// ---------------------------------------------------------------------------

namespace {
std::shared_ptr<TermNode> make_term(Term::Kind kind, SourceLocation loc) {
  auto n = std::make_shared<TermNode>();
  n->kind = kind;
  n->loc = loc;
  return n;
}
}  // namespace

Term Term::var(std::string name, SourceLocation loc) {
  auto n = make_term(Kind::Var, loc);
  n->name = std::move(name);
  return Term(std::move(n));
}

Term Term::pair(Term first, Term second, SourceLocation loc) {
  auto n = make_term(Kind::Pair, loc);
  n->first = std::move(first);
  n->second = std::move(second);
  return Term(std::move(n));
}

Term Term::proj(int index, Term of, SourceLocation loc) {
  if (index != 1 && index != 2) internal_error("projection index must be 1 or 2");
  auto n = make_term(Kind::Proj, loc);
  n->index = index;
  n->first = std::move(of);
  return Term(std::move(n));
}

Term Term::lam(std::string param, Type param_type, Term body, SourceLocation loc) {
  auto n = make_term(Kind::Lam, loc);
  n->name = std::move(param);
  n->param_type = std::move(param_type);
  n->first = std::move(body);
  return Term(std::move(n));
}

Term Term::fix(std::string fname, std::string param, Type param_type, Type result_type, Term body,
               SourceLocation loc) {
  auto n = make_term(Kind::Fix, loc);
  n->fname = std::move(fname);
  n->name = std::move(param);
  n->param_type = std::move(param_type);
  n->result_type = std::move(result_type);
  n->first = std::move(body);
  return Term(std::move(n));
}

Term Term::app(Term fn, Term arg, SourceLocation loc) {
  auto n = make_term(Kind::App, loc);
  n->first = std::move(fn);
  n->second = std::move(arg);
  return Term(std::move(n));
}

Term Term::let(std::string name, Term def, Term body, SourceLocation loc) {
  auto n = make_term(Kind::Let, loc);
  n->name = std::move(name);
  n->first = std::move(def);
  n->second = std::move(body);
  return Term(std::move(n));
}

Term::Kind Term::kind() const {
  if (!node_) internal_error("use of an empty term");
  return node_->kind;
}

const SourceLocation& Term::loc() const { return node_->loc; }
const std::string& Term::name() const { return node_->name; }
const std::string& Term::fname() const { return node_->fname; }
int Term::index() const { return node_->index; }
const Type& Term::param_type() const { return node_->param_type; }
const Type& Term::result_type() const { return node_->result_type; }
const Term& Term::first() const { return node_->first; }
const Term& Term::second() const { return node_->second; }
const Term& Term::body() const { return node_->first; }

std::string_view term_kind_name(Term::Kind kind) {
  switch (kind) {
    case Term::Kind::Var: return "var";
    case Term::Kind::Pair: return "pair";
    case Term::Kind::Proj: return "proj";
    case Term::Kind::Lam: return "lambda";
    case Term::Kind::Fix: return "fix";
    case Term::Kind::App: return "app";
    case Term::Kind::Let: return "let";
  }
  return "?";
}

namespace {

void type_free_names(const Type& t, std::vector<std::string>& bound, std::vector<std::string>& out) {
  auto note = [&](const std::string& n) {
    if (std::find(bound.begin(), bound.end(), n) != bound.end()) return;
    if (std::find(out.begin(), out.end(), n) == out.end()) out.push_back(n);
  };
  switch (t.kind()) {
    case Type::Kind::Atom:
      return;
    case Type::Kind::Product:
      type_free_names(t.left(), bound, out);
      type_free_names(t.right(), bound, out);
      return;
    case Type::Kind::Closure: {
      const auto& c = t.closure();
      for (const auto& b : c.captured.context) {
        note(b.name);
        type_free_names(b.type, bound, out);
      }
      type_free_names(c.param_type, bound, out);
      bound.push_back(c.param);
      type_free_names(c.result, bound, out);
      bound.pop_back();
      return;
    }
  }
}

void term_free_names(const Term& t, std::vector<std::string>& bound, std::vector<std::string>& out) {
  switch (t.kind()) {
    case Term::Kind::Var:
      if (std::find(bound.begin(), bound.end(), t.name()) == bound.end() &&
          std::find(out.begin(), out.end(), t.name()) == out.end()) {
        out.push_back(t.name());
      }
      return;
    case Term::Kind::Pair:
    case Term::Kind::App:
      term_free_names(t.first(), bound, out);
      term_free_names(t.second(), bound, out);
      return;
    case Term::Kind::Proj:
      term_free_names(t.first(), bound, out);
      return;
    case Term::Kind::Lam:
      type_free_names(t.param_type(), bound, out);
      bound.push_back(t.name());
      term_free_names(t.body(), bound, out);
      bound.pop_back();
      return;
    case Term::Kind::Fix:
      type_free_names(t.param_type(), bound, out);
      bound.push_back(t.name());
      type_free_names(t.result_type(), bound, out);
      bound.pop_back();
      bound.push_back(t.fname());
      bound.push_back(t.name());
      term_free_names(t.body(), bound, out);
      bound.pop_back();
      bound.pop_back();
      return;
    case Term::Kind::Let:
      term_free_names(t.first(), bound, out);
      bound.push_back(t.name());
      term_free_names(t.second(), bound, out);
      bound.pop_back();
      return;
  }
}

}  // namespace

std::vector<std::string> free_variables(const Term& t) {
  std::vector<std::string> bound;
  std::vector<std::string> out;
  term_free_names(t, bound, out);
  return out;
}

std::size_t term_size(const Term& t) {
  switch (t.kind()) {
    case Term::Kind::Var:
      return 1;
    case Term::Kind::Pair:
    case Term::Kind::App:
    case Term::Kind::Let:
      return 1 + term_size(t.first()) + term_size(t.second());
    case Term::Kind::Proj:
    case Term::Kind::Lam:
    case Term::Kind::Fix:
      return 1 + term_size(t.first());
  }
  return 1;
}

// ---------------------------------------------------------------------------
// Names
// ---------------------------------------------------------------------------

namespace {
std::atomic<unsigned long> g_fresh_counter{0};
}

std::string_view base_name(std::string_view name) {
  auto pos = name.find('\'');
  return pos == std::string_view::npos ? name : name.substr(0, pos);
}

std::string fresh_name(std::string_view base) {
  return std::string(base_name(base)) + "'" + std::to_string(++g_fresh_counter);
}

}  // namespace occ
