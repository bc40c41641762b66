import pytest

import openclosure as oc

SESSION = r"let y = (y1, y2) in (y, \(x:s) z)"


def ctx(*entries):
    return oc.Context(list(entries))


def test_pair_example():
    g = ctx(("y", "σ"), ("z", "τ"))
    r = oc.infer(g, r"(y, \(x:ρ) z)")
    assert r.phi == [("y", 1), ("z", 0)]
    assert r.type == oc.parse_type("σ * ([y:σ^0, z:τ^1](x:ρ^0) -> τ)")
    assert r.derivation(ascii=True).startswith("[Product] y:σ^1,z:τ^0 |- ")


def test_session_transcript():
    code, out, err = oc.run(SESSION, ascii=True)
    assert code == 0, err
    assert "y1:ty_y1^1,y2:ty_y2^1,z:ty_z^0 |-" in out
    assert "((val_y1, val_y2), ([y1,y2,z], ((y -> (val_y1, val_y2))), \\(x) z))" in out


def test_eval_and_value_typing():
    g = ctx(("x", "al"))
    vals = [("x", oc.Value.atom("al", "c"))]
    term = oc.parse_term(r"let y = x in \(z:be) y")
    v, check = oc.eval_open(vals, term, typing=g)
    assert v.is_closure()
    assert v.pending == ["x"]
    assert [n for n, _ in v.captured] == ["y"]
    assert check["failures"] == [] and check["checks"] > 0
    assert oc.value_has_type(g, v, oc.infer(g, term).type)
    assert oc.equivalent(vals, term)
    assert oc.eval_classic(vals, term, ascii=True).startswith("((x -> c, y -> c)")


def test_noninterference_report():
    g = ctx(("a", "bool"), ("b", "bool"))
    rep = oc.check_noninterference(g, "let w = (a, b) in pi1 w")
    assert rep["holds"] is True
    assert rep["pairs_tested"] == 4
    assert "result: holds" in oc.report_text(g, "a", ascii=True)


def test_errors_carry_kind():
    with pytest.raises(oc.OccError) as e:
        oc.parse_term("(a,")
    assert e.value.kind == "SyntaxError"
    g = ctx(("a", "int"), ("b", "bool"), ("u", "unit"))
    with pytest.raises(oc.OccError) as e:
        oc.infer(g, r"let x = a in let y = b in let f = \(g:[a:int^0, b:bool^0, u:unit^0, x:int^1](z:unit^0) -> int) g u in f")
    assert e.value.kind == "EscapeError"
    assert e.value.subject == "x"


def test_generated_terms_evaluate():
    g = ctx(("a", "al"), ("b", "be"))
    vals = [("a", oc.Value.atom("al", "0")), ("b", oc.Value.atom("be", "1"))]
    for seed in range(20):
        t = oc.gen_typed_term(g, 4, seed)
        ty = oc.infer(g, t).type
        v, check = oc.eval_open(vals, t, typing=g)
        assert oc.value_has_type(g, v, ty)
        assert oc.equivalent(vals, t)
