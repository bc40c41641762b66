#include <functional>

#include "builders.hpp"
#include "doctest.h"
#include "occ/eval.hpp"
#include "occ/typing.hpp"

using namespace occ;
using namespace build;

namespace {

Term v(const std::string& n) { return Term::var(n); }
Term pr(Term a, Term b) { return Term::pair(std::move(a), std::move(b)); }
Term lam(const std::string& x, Type t, Term b) { return Term::lam(x, std::move(t), std::move(b)); }
Term app(Term f, Term a) { return Term::app(std::move(f), std::move(a)); }
Term let(const std::string& x, Term d, Term b) { return Term::let(x, std::move(d), std::move(b)); }
Value c(const std::string& ty, const std::string& k) { return Value::atom(ty, k); }

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::Internal;
}

EvalOptions typed(const Context& g) {
  EvalOptions o;
  o.typing = g;
  o.self_check = true;
  o.record_derivation = true;
  return o;
}

// Runs both semantics and every available check.
Value run_both(const Context& g, const Valuation& vals, const Term& e) {
  auto r = eval_open(vals, e, typed(g));
  CHECK(check_reduction_derivation(*r.derivation) == "");
  CHECK(r.self_check.failures.empty());
  CHECK(r.self_check.premise_failures == 0);
  CHECK(r.self_check.typing_lost == 0);
  EvalOptions o;
  o.record_derivation = true;
  ClassicEnv W = classic_env_of(vals);
  auto cr = eval_classic(W, e, o);
  CHECK(check_classic_derivation(*cr.derivation) == "");
  CHECK(values_equiv_semantics(vals, r.value, W, cr.value));
  auto ty = infer(g, e);
  CHECK(value_has_type(g, r.value, ty.type));
  return r.value;
}

}  // namespace

TEST_CASE("let captures the defined variable after the body") {
  auto tx = at("tx"), s = at("s");
  Context g = ctx({{"x", tx}});
  Valuation vals({{"x", c("tx", "v")}});
  Term e = let("y", v("x"), lam("z", s, v("y")));
  Value r = run_both(g, vals, e);
  CHECK(r.pending() == std::vector<std::string>{"x"});
  REQUIRE(r.captured().size() == 1);
  CHECK(r.captured()[0].name == "y");
  CHECK(r.captured()[0].value.constant() == "v");
  REQUIRE(r.captured()[0].witness.has_value());
  CHECK(r.captured()[0].witness->psi == deps({{"x", 1}}));
  // y depends on x, and the closure needs y
  CHECK(value_has_type(g, r, clos({{"x", tx, 1}}, "z", 0, s, tx)));
}

TEST_CASE("classic closure holds the whole environment") {
  Valuation vals({{"x", c("tx", "v")}});
  Term e = let("y", v("x"), lam("z", at("s"), v("y")));
  auto r = eval_classic(classic_env_of(vals), e);
  REQUIRE(r.value.kind() == ClassicValue::Kind::Closure);
  REQUIRE(r.value.env().size() == 2);
  CHECK(r.value.env()[0].name == "x");
  CHECK(r.value.env()[1].name == "y");
  CHECK(r.value.env()[1].value.constant() == "v");
}

TEST_CASE("a lambda alone records nothing") {
  auto r = eval_open(Valuation{}, lam("x", at("al"), v("x")));
  CHECK(r.value.pending().empty());
  CHECK(r.value.captured().empty());
  CHECK(r.steps == 1);
}

TEST_CASE("projection of a pair") {
  Context g = ctx({{"x", at("al")}});
  Valuation vals({{"x", c("al", "v")}});
  Term e = Term::proj(1, pr(v("x"), lam("w", at("al"), v("w"))));
  Value r = run_both(g, vals, e);
  CHECK(r.constant() == "v");
}

TEST_CASE("session program result") {
  auto a = at("ty_y1"), b = at("ty_y2"), z = at("ty_z"), s = at("s");
  Context g = ctx({{"y1", a}, {"y2", b}, {"z", z}});
  Valuation vals({{"y1", c("ty_y1", "val_y1")}, {"y2", c("ty_y2", "val_y2")}, {"z", c("ty_z", "val_z")}});
  Term e = let("y", pr(v("y1"), v("y2")), pr(v("y"), lam("x", s, v("z"))));
  Value r = run_both(g, vals, e);
  CHECK(r.first().first().constant() == "val_y1");
  CHECK(r.second().pending() == std::vector<std::string>{"y1", "y2", "z"});
  REQUIRE(r.second().captured().size() == 1);
  CHECK(r.second().captured()[0].name == "y");
}

TEST_CASE("application substitutes the parameter and the captured values") {
  auto al = at("al"), be = at("be");
  Context g = ctx({{"a", al}, {"b", be}});
  Valuation vals({{"a", c("al", "0")}, {"b", c("be", "1")}});
  // let f = \x. \u. x in let k = b in f a
  Term e = let("f", lam("x", al, lam("u", be, v("x"))), let("k", v("b"), app(v("f"), v("a"))));
  Value r = run_both(g, vals, e);
  CHECK(r.pending() == std::vector<std::string>{"a", "b"});
  // the outer lets capture f and k on the way out
  REQUIRE(r.captured().size() == 3);
  CHECK(r.captured()[0].name == "f");
  CHECK(r.captured()[1].name == "k");
  CHECK(r.captured()[2].name == "x");
  CHECK(r.captured()[2].value.constant() == "0");
}

TEST_CASE("calling a closure that captured values") {
  auto al = at("al"), be = at("be");
  Context g = ctx({{"a", al}, {"b", be}});
  Valuation vals({{"a", c("al", "0")}, {"b", c("be", "1")}});
  // let g = (let y = a in \u. (y, u)) in g b
  Term e = let("g", let("y", v("a"), lam("u", be, pr(v("y"), v("u")))), app(v("g"), v("b")));
  Value r = run_both(g, vals, e);
  CHECK(r.first().constant() == "0");
  CHECK(r.second().constant() == "1");
}

TEST_CASE("closures returned through applications") {
  auto al = at("al"), be = at("be");
  Context g = ctx({{"a", al}, {"b", be}});
  Valuation vals({{"a", c("al", "0")}, {"b", c("be", "1")}});
  // let h = \x. let y = x in \u. y in (h a) b
  Term e = let("h", lam("x", al, let("y", v("x"), lam("u", be, v("y")))), app(app(v("h"), v("a")), v("b")));
  Value r = run_both(g, vals, e);
  CHECK(r.constant() == "0");
  Term partial = let("h", lam("x", al, let("y", v("x"), lam("u", be, v("y")))), app(v("h"), v("a")));
  Value p = run_both(g, vals, partial);
  CHECK(p.is_closure());
}

TEST_CASE("stuck terms and unbound variables") {
  Valuation vals({{"x", c("al", "v")}});
  CHECK(kind_of([&] { eval_open(vals, Term::proj(1, v("x"))); }) == ErrorKind::StuckError);
  CHECK(kind_of([&] { eval_open(vals, app(v("x"), v("x"))); }) == ErrorKind::StuckError);
  CHECK(kind_of([&] { eval_open(vals, v("q")); }) == ErrorKind::UnboundVariable);
  CHECK(kind_of([&] { eval_classic(classic_env_of(vals), Term::proj(2, v("x"))); }) == ErrorKind::StuckError);
}

TEST_CASE("closure applied where its pending list is not a prefix") {
  // A closure value that pends on a variable the current valuation lacks.
  Value f = Value::closure({"q"}, {}, lam("u", at("al"), v("u")));
  Valuation vals({{"x", c("al", "v")}, {"f", f}});
  CHECK(kind_of([&] { eval_open(vals, app(v("f"), v("x"))); }) == ErrorKind::PrefixError);
}

TEST_CASE("divergence hits the budget") {
  auto al = at("al");
  Term loop = Term::fix("f", "x", al, al, app(v("f"), v("x")));
  Valuation vals({{"a", c("al", "0")}});
  EvalOptions o;
  o.max_steps = 500;
  CHECK(kind_of([&] { eval_open(vals, app(loop, v("a")), o); }) == ErrorKind::BudgetExceeded);
  CHECK(kind_of([&] { eval_classic(classic_env_of(vals), app(loop, v("a")), o); }) == ErrorKind::BudgetExceeded);
  EvalOptions deep;
  deep.max_depth = 50;
  CHECK(kind_of([&] { eval_open(vals, app(loop, v("a")), deep); }) == ErrorKind::BudgetExceeded);
}

TEST_CASE("fix application binds the function and does not substitute") {
  auto al = at("al");
  // (fix f(x). x) a
  Term id = Term::fix("f", "x", al, al, v("x"));
  Valuation vals({{"a", c("al", "0")}});
  EvalOptions o;
  o.record_derivation = true;
  auto r = eval_open(vals, app(id, v("a")), o);
  CHECK(r.value.constant() == "0");
  CHECK(r.derivation->rule == "Red-App-Fix");
  CHECK(r.derivation->premises[2]->env.names() == std::vector<std::string>{"a", "f", "x"});
  CHECK(check_reduction_derivation(*r.derivation) == "");
  auto cr = eval_classic(classic_env_of(vals), app(id, v("a")), o);
  CHECK(cr.derivation->rule == "Classic-Red-App-Fix");
  CHECK(check_classic_derivation(*cr.derivation) == "");
}

TEST_CASE("equivalence distinguishes captured values") {
  auto tx = at("tx");
  Term e = let("y", v("x"), lam("z", at("s"), v("y")));
  Valuation v1({{"x", c("tx", "0")}});
  Valuation v2({{"x", c("tx", "1")}});
  auto r1 = eval_open(v1, e);
  auto w1 = eval_classic(classic_env_of(v1), e);
  auto w2 = eval_classic(classic_env_of(v2), e);
  CHECK(values_equiv_semantics(v1, r1.value, classic_env_of(v1), w1.value));
  CHECK(!values_equiv_semantics(v1, r1.value, classic_env_of(v2), w2.value));
  CHECK(valuations_equiv_semantics(v1, classic_env_of(v1)));
  CHECK(!valuations_equiv_semantics(v1, classic_env_of(v2)));
  (void)tx;
}

TEST_CASE("tampered reduction derivation is rejected") {
  Context g = ctx({{"x", at("tx")}});
  Valuation vals({{"x", c("tx", "v")}});
  EvalOptions o;
  o.record_derivation = true;
  auto r = eval_open(vals, let("y", v("x"), lam("z", at("s"), v("y"))), o);
  auto copy = std::make_shared<ReductionDerivation>(*r.derivation);
  copy->value = c("tx", "other");
  CHECK(check_reduction_derivation(*copy) != "");
  auto copy2 = std::make_shared<ReductionDerivation>(*r.derivation);
  copy2->substitutions.clear();
  CHECK(check_reduction_derivation(*copy2) != "");
}

TEST_CASE("evaluation is deterministic") {
  auto al = at("al"), be = at("be");
  Valuation vals({{"a", c("al", "0")}, {"b", c("be", "1")}});
  Term e = let("h", lam("x", al, let("y", v("x"), lam("u", be, v("y")))), app(v("h"), v("a")));
  CHECK(same_value(eval_open(vals, e).value, eval_open(vals, e).value));
}

TEST_CASE("captured closure behind an interposed binding") {
  // x2's closure is pending on [q,x1]; in the body context x0 sits between q and x1,
  // so the substitution step's premises do not hold there. The result still checks.
  auto ga = at("ga");
  Context g = ctx({{"q", ga}});
  Valuation vals({{"q", c("ga", "0")}});
  Term e = let("x0", let("x1", v("q"), let("x2", lam("x3", ga, v("x3")), lam("x4", ga, v("x4")))),
               app(v("x0"), v("q")));
  auto r = eval_open(vals, e, typed(g));
  CHECK(r.value.constant() == "0");
  CHECK(r.self_check.failures.empty());
  CHECK(r.self_check.premise_failures == 1);
  CHECK(value_has_type(g, r.value, infer(g, e).type));
  ClassicEnv W = classic_env_of(vals);
  CHECK(values_equiv_semantics(vals, r.value, W, eval_classic(W, e).value));
}
