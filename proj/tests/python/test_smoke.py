import pytest

import sobv

EXAMPLE = "exists f:3 . forall p:0 . forall q:0 . !f(p,p,q) & f(p, q & !q, q)"


def test_example_pipeline():
    f = sobv.parse_so2(EXAMPLE)
    assert sobv.validate(f) == []
    assert sobv.decide_so2(f)["status"] == "unsat"
    g = sobv.reduce(f)
    assert str(g) == (
        "exists x_f:8 . forall x_p:1 . forall x_q:1 . "
        "((~x_f[(0^[5] . x_p . x_p . x_q)] & x_f[(0^[5] . x_p . (x_q & ~x_q) . x_q)]) = 1^[1])"
    )
    assert sobv.solve_bv2(g)["status"] == "unsat"
    assert sobv.formula_size(g.lower()) == 62


def test_witness_and_eval():
    v = sobv.decide_so2(sobv.parse_so2("exists f:1 . f(0)"))
    assert v == {"status": "sat", "diagnostic": v["diagnostic"], "witness": {"f": "01"}}
    m = sobv.parse_so2("!f(p,p,q) & f(p, 0, q)", allow_free=True)
    assert sobv.eval_so2(m, {"f": "00000000", "p": "0", "q": "0"}) is False
    assert sobv.eval_so2(m, {"f": "00000001", "p": "0", "q": "1"}) is False


def test_smt2_round_trip():
    g = sobv.reduce(sobv.parse_so2(EXAMPLE), lower=True)
    text = sobv.emit_smt2(g)
    assert text.startswith("(set-logic BV)\n")
    back = sobv.parse_smt2(text)
    assert back.alpha_equivalent(g)
    assert sobv.emit_smt2(back) == text


def test_errors():
    with pytest.raises(sobv.ArityError):
        sobv.parse_so2("exists f:2 . f(x)")
    with pytest.raises(sobv.ParseError):
        sobv.parse_so2("exists p:0 . p & & p")
    with pytest.raises(sobv.SortError):
        sobv.parse_smt2("(declare-const a (_ BitVec 4))(declare-const b (_ BitVec 3))(assert (= a b))")
    assert issubclass(sobv.SortError, sobv.SobvError)
    v = sobv.decide_so2(sobv.parse_so2(EXAMPLE), bit_budget=4)
    assert v["status"] == "resource-exceeded"


def test_scalars_and_generator():
    assert sobv.scalar_length(0) == 1
    assert sobv.scalar_length(5) == 3
    assert sobv.scalar_length(2**1000) == 1001
    a = sobv.gen_random_so2(11)
    assert str(a) == str(sobv.gen_random_so2(11))
    r = sobv.cross_check(a)
    assert r["agree"] and not r["skipped"]
    qbf = sobv.gen_random_so2(3, max_arity=0)
    assert all(arity == 0 for _, _, arity in qbf.prefix)
