#include <functional>
#include <set>

#include "builders.hpp"
#include "doctest.h"
#include "json.hpp"
#include "occ/analysis.hpp"
#include "occ/parse.hpp"
#include "occ/typing.hpp"

using namespace occ;
using namespace build;

namespace {

Value c(const std::string& ty, const std::string& k) { return Value::atom(ty, k); }

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::Internal;
}

AtomDomain bools() {
  AtomDomain d;
  d.set("bool", {"tt", "ff"});
  return d;
}

}  // namespace

TEST_CASE("domains") {
  AtomDomain d;
  CHECK(d.constants("ty_x") == std::vector<std::string>{"val_x", "val_x'"});
  CHECK(d.constants("int") == std::vector<std::string>{"c0_int", "c1_int"});
  CHECK(bools().constants("bool") == std::vector<std::string>{"tt", "ff"});
  CHECK(enumerate_values(prod(at("a"), at("b")), d).size() == 4);
  CHECK(enumerate_valuations(ctx({{"x", at("a")}, {"y", at("b")}}), d).size() == 4);
  CHECK(kind_of([&] { enumerate_valuations(ctx({{"x", at("a")}, {"y", at("b")}}), d, 3); }) ==
        ErrorKind::CombinatorialLimit);
}

TEST_CASE("phi-equivalent valuations") {
  Valuation a({{"x", c("t", "1")}, {"y", c("t", "1")}});
  Valuation b({{"x", c("t", "2")}, {"y", c("t", "1")}});
  CHECK(phi_equiv_valuations(a, b, deps({{"x", 0}, {"y", 0}})));
  CHECK(!phi_equiv_valuations(a, b, deps({{"x", 1}, {"y", 0}})));
  CHECK(phi_equiv_valuations(a, b, deps({{"x", 0}, {"y", 1}})));
}

TEST_CASE("closures differing only in an unneeded capture") {
  Context g = ctx({{"x", at("bool")}});
  Term e = parse_term("let y = x in \\(z:al) z");
  Valuation v1({{"x", c("bool", "tt")}});
  Valuation v2({{"x", c("bool", "ff")}});
  EvalOptions o;
  o.typing = g;
  Value r1 = eval_open(v1, e, o).value;
  Value r2 = eval_open(v2, e, o).value;
  Type t = infer(g, e).type;
  CHECK(value_equiv(g, r1, r2, t, deps({{"x", 0}})));
  CHECK(!value_equiv(g, r1, r2, t, deps({{"x", 1}})));
  CHECK(value_equiv(g, r1, r1, t, deps({{"x", 1}})));
  CHECK(kind_of([&] { value_equiv(g, r1, r2, at("bool"), deps({{"x", 0}})); }) == ErrorKind::WitnessNotFound);
}

TEST_CASE("non-interference examples") {
  Context g = ctx({{"x", at("bool")}});
  auto r = check_noninterference(g, parse_term("let y = x in \\(z:al) z"), bools());
  CHECK(r.phi == deps({{"x", 0}}));
  CHECK(r.pairs_tested == 4);
  CHECK(r.holds());
  auto rx = check_noninterference(g, parse_term("x"), bools());
  CHECK(rx.pairs_tested == 2);
  CHECK(rx.holds());
  Context ab = ctx({{"a", at("bool")}, {"b", at("bool")}});
  auto rp = check_noninterference(ab, parse_term("let w = (a, b) in pi1 w"), bools());
  CHECK(rp.phi == deps({{"a", 1}, {"b", 1}}));
  CHECK(rp.pairs_tested == 4);
  CHECK(rp.holds());
  NonInterferenceOptions tight;
  tight.max_pairs = 3;
  CHECK(kind_of([&] { check_noninterference(ab, parse_term("a"), bools(), tight); }) == ErrorKind::CombinatorialLimit);
}

TEST_CASE("reports") {
  Context g = ctx({{"x", at("bool")}});
  auto r = check_noninterference(g, parse_term("let y = x in \\(z:al) z"), bools());
  std::string text = report_text(r, PrintOptions{true});
  CHECK(text.find("pairs tested: 4") != std::string::npos);
  CHECK(text.find("result: holds") != std::string::npos);
  auto j = nlohmann::json::parse(report_json(r));
  CHECK(j["pairs_tested"] == 4);
  CHECK(j["holds"] == true);
  CHECK(j["violations"].empty());
  CHECK(j["context"][0]["dep"] == 0);
  // a hand-made violation renders one record
  r.violations.push_back({Valuation({{"x", c("bool", "tt")}}), Valuation({{"x", c("bool", "ff")}}), c("bool", "tt"),
                          c("bool", "ff"), "atomic results differ"});
  auto jv = nlohmann::json::parse(report_json(r));
  CHECK(jv["violations"].size() == 1);
  CHECK(jv["violations"][0]["left"][0]["value"] == "tt");
  CHECK(report_text(r).find("VIOLATED") != std::string::npos);
}

TEST_CASE("dependency oracle") {
  Context ab = ctx({{"a", at("bool")}, {"b", at("bool")}});
  CHECK(semantic_deps_oracle(ab, parse_term("let w = (a, b) in pi1 w"), bools()) == std::vector<std::string>{"a"});
  CHECK(semantic_deps_oracle(ab, parse_term("b"), bools()) == std::vector<std::string>{"b"});
  CHECK(semantic_deps_oracle(ab, parse_term("(\\(u:bool) a) b"), bools()) == std::vector<std::string>{"a"});
  Context one = ctx({{"a", at("bool")}, {"c", at("unit")}});
  AtomDomain d = bools();
  d.set("unit", {"u"});
  CHECK(semantic_deps_oracle(one, parse_term("c"), d).empty());
}

TEST_CASE("generated terms are well-typed and varied") {
  Context g = ctx({{"a", at("al")}, {"b", at("be")}});
  std::set<Term::Kind> roots;
  int lets = 0, apps = 0;
  std::function<void(const Term&)> count = [&](const Term& t) {
    if (t.kind() == Term::Kind::Let) ++lets;
    if (t.kind() == Term::Kind::App) ++apps;
    switch (t.kind()) {
      case Term::Kind::Var:
        return;
      case Term::Kind::Lam:
      case Term::Kind::Fix:
        count(t.body());
        return;
      case Term::Kind::Proj:
        count(t.first());
        return;
      default:
        count(t.first());
        count(t.second());
    }
  };
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Term t = gen_typed_term(g, std::nullopt, 5, seed);
    CHECK_NOTHROW(infer(g, t));
    roots.insert(t.kind());
    count(t);
  }
  CHECK(lets >= 1);
  CHECK(apps >= 1);
  CHECK(roots.size() >= 4);
  Term d1 = gen_typed_term(ctx({{"x", at("al")}}), std::nullopt, 1, 7);
  CHECK(term_size(d1) <= 2);
  Term same1 = gen_typed_term(g, std::nullopt, 5, 42);
  Term same2 = gen_typed_term(g, std::nullopt, 5, 42);
  CHECK(alpha_equal(same1, same2));
}

TEST_CASE("targeted generation") {
  Context g = ctx({{"a", at("al")}, {"b", at("be")}});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Term t = gen_typed_term(g, prod(at("al"), at("be")), 4, seed);
    CHECK(alpha_equal(infer(g, t).type, prod(at("al"), at("be"))));
  }
  CHECK(kind_of([&] { gen_typed_term(g, at("nope"), 3, 1); }) == ErrorKind::GenerationExhausted);
}

TEST_CASE("fix generation behind a flag") {
  Context g = ctx({{"a", at("al")}});
  GenOptions o;
  o.allow_fix = true;
  int fixes = 0;
  std::function<bool(const Term&)> has_fix = [&](const Term& t) -> bool {
    switch (t.kind()) {
      case Term::Kind::Fix:
        return true;
      case Term::Kind::Var:
        return false;
      case Term::Kind::Lam:
        return has_fix(t.body());
      case Term::Kind::Proj:
        return has_fix(t.first());
      default:
        return has_fix(t.first()) || has_fix(t.second());
    }
  };
  for (std::uint64_t seed = 0; seed < 100; ++seed) fixes += has_fix(gen_typed_term(g, std::nullopt, 4, seed, o));
  CHECK(fixes > 0);
}
