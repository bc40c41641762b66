#include <functional>

#include "builders.hpp"
#include "doctest.h"
#include "occ/analysis.hpp"
#include "occ/parse.hpp"
#include "occ/print.hpp"
#include "occ/typing.hpp"

using namespace occ;
using namespace build;

namespace {

const PrintOptions kAscii{true};

Error error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e;
  }
  return Error(ErrorKind::Internal, "no error");
}

}  // namespace

TEST_CASE("session expression parses") {
  Term e = parse_term("let y = (y1, y2) in (y, \\(x:s) z)");
  REQUIRE(e.kind() == Term::Kind::Let);
  CHECK(e.name() == "y");
  CHECK(e.first().kind() == Term::Kind::Pair);
  CHECK(e.second().second().kind() == Term::Kind::Lam);
  CHECK(print_term(e) == "let y = (y1, y2) in (y, λ(x:s) z)");
  CHECK(print_term(e, kAscii) == "let y = (y1, y2) in (y, \\(x:s) z)");
  CHECK(alpha_equal(parse_term("let y = (y1, y2) in (y, λ(x:σ) z)").second().second().param_type(), at("σ")));
}

TEST_CASE("projection and application associativity") {
  Term p = parse_term("pi1 (a, b)");
  CHECK(p.kind() == Term::Kind::Proj);
  CHECK(p.index() == 1);
  CHECK(p.first().kind() == Term::Kind::Pair);
  Term a = parse_term("x y z");
  REQUIRE(a.kind() == Term::Kind::App);
  CHECK(a.first().kind() == Term::Kind::App);
  CHECK(a.first().first().name() == "x");
  CHECK(a.second().name() == "z");
  CHECK(print_term(parse_term("x (y z)")) == "x (y z)");
}

TEST_CASE("closure types, annotations and defaults") {
  Type t = parse_type("[y:s^0, z:t^1](x:r) -> t");
  CHECK(alpha_equal(t, clos({{"y", at("s"), 0}, {"z", at("t"), 1}}, "x", 0, at("r"), at("t"))));
  CHECK(alpha_equal(parse_type("[y:s⁰,z:t¹](x:r⁰) → t"), t));
  CHECK(print_type(t) == "[y:s⁰,z:t¹](x:r⁰) → t");
  CHECK(print_type(t, kAscii) == "[y:s^0,z:t^1](x:r^0) -> t");
  Type p = prod(prod(at("a"), at("b")), t);
  CHECK(print_type(p, kAscii) == "((a * b) * [y:s^0,z:t^1](x:r^0) -> t)");
  CHECK(alpha_equal(parse_type(print_type(p, kAscii)), p));
  Type left = prod(t, at("a"));
  CHECK(alpha_equal(parse_type(print_type(left)), left));
  CHECK(alpha_equal(parse_type("s * t"), prod(at("s"), at("t"))));
}

TEST_CASE("syntax errors carry a location") {
  Error e = error_of([] { parse_term("let x = in y"); });
  CHECK(e.kind() == ErrorKind::SyntaxError);
  CHECK(e.location().line == 1);
  CHECK(e.location().column == 9);
  CHECK(error_of([] { parse_term("(a, b"); }).kind() == ErrorKind::SyntaxError);
  CHECK(error_of([] { parse_term("\\(x:a^2) x"); }).kind() == ErrorKind::SyntaxError);
  Error multi = error_of([] { parse_term("let x = a\nin ?"); });
  CHECK(multi.location().line == 2);
}

TEST_CASE("fix syntax") {
  Term f = parse_term("fix f(x:a):a = f x");
  REQUIRE(f.kind() == Term::Kind::Fix);
  CHECK(f.fname() == "f");
  CHECK(print_term(f, kAscii) == "fix f(x:a):a = f x");
}

TEST_CASE("shadowing binders are renamed with their annotations") {
  ParsedProgram p = parse_program("let x = a in let x = (x, x) in \\(g:[a:al^0, x:al^1](u:al) -> al) x");
  CHECK(p.free == std::vector<std::string>{"a"});
  REQUIRE(p.renamed.size() == 1);
  CHECK(p.renamed[0].first == "x");
  CHECK(p.renamed[0].second == "x'1");
  // inner x refers to the renamed binder, the annotation to the outer one
  Term inner = p.term.second();
  CHECK(inner.name() == "x'1");
  CHECK(inner.first().first().name() == "x");
  CHECK(inner.second().body().name() == "x'1");
  CHECK(mentions(inner.second().param_type(), "x'1"));
  CHECK(!mentions(inner.second().param_type(), "x"));
}

TEST_CASE("binder clashing with a free variable is renamed") {
  ParsedProgram p = parse_program("(let x = y in x, x)");
  CHECK(p.free == std::vector<std::string>{"y", "x"});
  CHECK(p.term.first().name() == "x'1");
  CHECK(p.term.second().name() == "x");
}

TEST_CASE("values print in the session format") {
  Value v = Value::pair(Value::pair(Value::atom("ty_y1", "val_y1"), Value::atom("ty_y2", "val_y2")),
                        subst_value(Value::closure({"y1", "y2", "z", "y"}, {}, parse_term("\\(x:s) z")), "y",
                                    Value::pair(Value::atom("ty_y1", "val_y1"), Value::atom("ty_y2", "val_y2"))));
  CHECK(print_value(v) == "((val_y1, val_y2), ([y1,y2,z], ((y ↦ (val_y1, val_y2))), λ(x) z))");
  CHECK(print_value(v, kAscii) == "((val_y1, val_y2), ([y1,y2,z], ((y -> (val_y1, val_y2))), \\(x) z))");
  CHECK(print_value(Value::closure({}, {}, parse_term("\\(x:a) x"))) == "([], ∅, λ(x) x)");
}

TEST_CASE("annotated contexts") {
  AnnotatedContext c(ctx({{"y1", at("ty_y1")}, {"z", at("ty_z")}}), deps({{"y1", 1}, {"z", 0}}));
  CHECK(print_annotated_context(c) == "y1:ty_y1¹,z:ty_z⁰");
  CHECK(print_annotated_context(AnnotatedContext{}).empty());
  CHECK(print_deps(deps({{"a", 1}, {"b", 0}})) == "{a:1, b:0}");
}

TEST_CASE("round trip on generated terms and their types") {
  Context g = ctx({{"a", at("al")}, {"b", at("be")}});
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Term t;
    try {
      t = gen_typed_term(g, std::nullopt, 5, seed);
    } catch (const Error&) {
      continue;
    }
    for (bool ascii : {false, true}) {
      PrintOptions o{ascii};
      Term back = parse_term(print_term(t, o));
      CHECK_MESSAGE(alpha_equal(back, t), print_term(t, o));
      Type ty = infer(g, t).type;
      CHECK_MESSAGE(alpha_equal(parse_type(print_type(ty, o)), ty), print_type(ty, o));
    }
    ++checked;
  }
  CHECK(checked > 150);
}
