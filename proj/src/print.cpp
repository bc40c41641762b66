#include "occ/print.hpp"

namespace occ {

namespace {

const char* lambda(const PrintOptions& o) { return o.ascii ? "\\" : "λ"; }
const char* arrow(const PrintOptions& o) { return o.ascii ? "->" : "→"; }
const char* mapsto(const PrintOptions& o) { return o.ascii ? "->" : "↦"; }

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

// Precedence levels of term positions.
enum class Pos { Top, Function, Argument };

std::string term(const Term& e, Pos pos, const PrintOptions& o);

std::string wrap_unless(bool ok, const std::string& s) { return ok ? s : "(" + s + ")"; }

std::string binder(const Term& e, const PrintOptions& o) {
  switch (e.kind()) {
    case Term::Kind::Lam:
      return std::string(lambda(o)) + "(" + e.name() + ":" + print_type(e.param_type(), o) + ") " +
             term(e.body(), Pos::Top, o);
    case Term::Kind::Fix:
      return "fix " + e.fname() + "(" + e.name() + ":" + print_type(e.param_type(), o) +
             "):" + print_type(e.result_type(), o) + " = " + term(e.body(), Pos::Top, o);
    case Term::Kind::Let:
      return "let " + e.name() + " = " + term(e.first(), Pos::Top, o) + " in " + term(e.second(), Pos::Top, o);
    default:
      internal_error("binder on a non-binding term");
  }
}

std::string term(const Term& e, Pos pos, const PrintOptions& o) {
  switch (e.kind()) {
    case Term::Kind::Var:
      return e.name();
    case Term::Kind::Pair:
      return "(" + term(e.first(), Pos::Top, o) + ", " + term(e.second(), Pos::Top, o) + ")";
    case Term::Kind::Proj:
      return "pi" + std::to_string(e.index()) + " " + term(e.first(), Pos::Argument, o);
    case Term::Kind::App:
      return wrap_unless(pos != Pos::Argument,
                         term(e.first(), Pos::Function, o) + " " + term(e.second(), Pos::Argument, o));
    case Term::Kind::Lam:
    case Term::Kind::Fix:
    case Term::Kind::Let:
      return wrap_unless(pos == Pos::Top, binder(e, o));
  }
  return "";
}

std::string value(const Value& v, const PrintOptions& o) {
  switch (v.kind()) {
    case Value::Kind::Atom:
      return v.constant();
    case Value::Kind::Pair:
      return "(" + value(v.first(), o) + ", " + value(v.second(), o) + ")";
    case Value::Kind::Closure: {
      std::vector<std::string> caps;
      for (const auto& c : v.captured()) caps.push_back("(" + c.name + " " + mapsto(o) + " " + value(c.value, o) + ")");
      std::string captured = caps.empty() ? (o.ascii ? "()" : "∅") : "(" + join(caps, ", ") + ")";
      const Term& code = v.code();
      std::string head = code.kind() == Term::Kind::Fix ? "fix " + code.fname() + "(" + code.name() + ")"
                                                         : std::string(lambda(o)) + "(" + code.name() + ")";
      return "([" + join(v.pending(), ",") + "], " + captured + ", " + head + " " + term(code.body(), Pos::Top, o) +
             ")";
    }
  }
  return "";
}

std::string classic(const ClassicValue& v, const PrintOptions& o) {
  switch (v.kind()) {
    case ClassicValue::Kind::Atom:
      return v.constant();
    case ClassicValue::Kind::Pair:
      return "(" + classic(v.first(), o) + ", " + classic(v.second(), o) + ")";
    case ClassicValue::Kind::Closure: {
      const Term& code = v.code();
      std::string head = code.kind() == Term::Kind::Fix ? "fix " + code.fname() + "(" + code.name() + ")"
                                                         : std::string(lambda(o)) + "(" + code.name() + ")";
      return "(" + print_classic_env(v.env(), o) + ", " + head + " " + term(code.body(), Pos::Top, o) + ")";
    }
  }
  return "";
}

}  // namespace

std::string print_dep(Dep d, const PrintOptions& o) {
  if (o.ascii) return d == Dep::One ? "^1" : "^0";
  return d == Dep::One ? "¹" : "⁰";
}

std::string print_type(const Type& t, const PrintOptions& o) {
  switch (t.kind()) {
    case Type::Kind::Atom:
      return t.atom_name();
    case Type::Kind::Product: {
      std::string l = print_type(t.left(), o);
      if (t.left().is_closure()) l = "(" + l + ")";
      return "(" + l + " * " + print_type(t.right(), o) + ")";
    }
    case Type::Kind::Closure: {
      const ClosureData& c = t.closure();
      return "[" + print_annotated_context(c.captured, o) + "](" + c.param + ":" + print_type(c.param_type, o) +
             print_dep(c.param_dep, o) + ") " + arrow(o) + " " + print_type(c.result, o);
    }
  }
  return "";
}

std::string print_context(const Context& c, const PrintOptions& o) {
  std::vector<std::string> parts;
  for (const auto& b : c) parts.push_back(b.name + ":" + print_type(b.type, o));
  return join(parts, ",");
}

std::string print_annotated_context(const AnnotatedContext& c, const PrintOptions& o) {
  std::vector<std::string> parts;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const auto& b = c.context[i];
    std::string ty = print_type(b.type, o);
    if (b.type.is_closure()) ty = "(" + ty + ")";
    parts.push_back(b.name + ":" + ty + print_dep(c.deps[i].dep, o));
  }
  return join(parts, ",");
}

std::string print_deps(const DepVector& d) {
  std::vector<std::string> parts;
  for (const auto& e : d) parts.push_back(e.name + ":" + std::to_string(to_int(e.dep)));
  return "{" + join(parts, ", ") + "}";
}

std::string print_term(const Term& e, const PrintOptions& o) { return term(e, Pos::Top, o); }

std::string print_value(const Value& v, const PrintOptions& o) { return value(v, o); }

std::string print_valuation(const Valuation& v, const PrintOptions& o) {
  std::vector<std::string> parts;
  for (const auto& e : v) parts.push_back(e.name + " " + mapsto(o) + " " + value(e.value, o));
  return "(" + join(parts, ", ") + ")";
}

std::string print_classic_value(const ClassicValue& v, const PrintOptions& o) { return classic(v, o); }

std::string print_classic_env(const ClassicEnv& env, const PrintOptions& o) {
  std::vector<std::string> parts;
  for (const auto& b : env) parts.push_back(b.name + " " + mapsto(o) + " " + classic(b.value, o));
  return "(" + join(parts, ", ") + ")";
}

}  // namespace occ
