import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from qtails import catalog as cat
from qtails.dsl import (
    BUILTINS,
    KEYWORDS,
    BinOp,
    Call,
    EvalError,
    Inf,
    Name,
    Neg,
    Num,
    ParseError,
    Pow,
    Str,
    Var,
    evaluate,
    parse,
    parse_expr,
    print_script,
    run_text,
    shipped_scripts,
    to_text,
)
from qtails.pell import error_series, mock_theta_f, omega_n, sigma_series, theta_n
from qtails.series import QSeries

SIGMA = "sum(n, 0, inf, q^(n*(n+1)/2) / poch(-q, 1, n))"


def test_sigma_example():
    s = parse(f"let s = {SIGMA}")
    assert s.statements[0].name == "s"
    assert evaluate(SIGMA, 5).raw() == [1, 1, -1, 2, -2]


def test_simple_evaluations():
    assert evaluate("1/(1−q)", 4).raw() == [1, 1, 1, 1]
    assert evaluate("sum(n,1,inf, q^n)", 4).raw() == [0, 1, 1, 1]
    assert evaluate("qbinom(2,1)", 4) == QSeries([1, 1], 4)
    with pytest.raises(EvalError, match="negative power"):
        evaluate("q^-1 * q^2", 4)
    assert evaluate("(1+t)*(1-t)", 3, torder=4).coeff(2) == QSeries([-1], 3)


def test_assert_parses():
    s = parse("assert_eq(qbinom(2,1), 1+q)")
    assert type(s.statements[0]).__name__ == "AssertEq"
    rep = run_text("assert_eq(qbinom(2,1), 1+q)", 10)
    assert rep.passed


def test_parse_errors():
    with pytest.raises(ParseError) as ei:
        parse("let x = poch(")
    assert (ei.value.line, ei.value.col) == (1, 13)
    with pytest.raises(ParseError, match="unknown builtin"):
        parse_expr("foo(q)")
    with pytest.raises(ParseError, match="takes 3 arguments"):
        parse_expr("poch(q, 1)")
    with pytest.raises(ParseError, match="empty script"):
        parse("")
    with pytest.raises(ParseError, match="empty script"):
        parse("# only a comment\n")
    with pytest.raises(ParseError) as ei:
        parse("let a = 1\nlet b = (q + 1")
    assert ei.value.line == 2
    with pytest.raises(ParseError, match="reserved"):
        parse("let q = 1")


def test_eval_errors():
    with pytest.raises(EvalError):
        evaluate("q^(1/2)", 5)
    with pytest.raises(EvalError):
        evaluate("1/q", 5)
    with pytest.raises(EvalError):
        evaluate("sum(n, 0, inf, 1)", 5)
    with pytest.raises(EvalError):
        evaluate("undefined_name + 1", 5)
    with pytest.raises(EvalError) as ei:
        run_text("let a = 1\nlet b = 1/q", 5)
    assert ei.value.statement == 1


def test_unicode_minus_equivalent():
    assert parse_expr("1 − q^2") == parse_expr("1 - q^2")


def _omega_text(n):
    return f"sum(j, 0, {n}, sum(k, 0, j, q^(j*(j+1)/2 + k*(k+1)/2)*qbinom(j, k)*qbinom({n}-k, j)))"


def _theta_text(n):
    return f"sum(j, 0, {n}, sum(k, 0, j, q^(j*(j+1)/2 + k*(k-1)/2)*qbinom(j, k)*qbinom({n}-k, j)))"


@pytest.mark.parametrize("n", [0, 1, 3, 6, 9])
def test_dual_path_sequences(n):
    assert evaluate(_omega_text(n), 40) == omega_n(n, 40)
    assert evaluate(_theta_text(n), 40) == theta_n(n, 40)


def test_dual_path_named_series():
    assert evaluate(SIGMA, 40) == sigma_series(40)
    e1 = "sum(n, 0, inf, poch(q, 1, n)*(-1)^n*q^(n*(n+1)/2)/poch(-q, 1, n))"
    e2 = "sum(n, 1, inf, poch(q, 1, n-1)*(-1)^n*q^(n*(n+1)/2)/poch(-q, 1, n))"
    f = "sum(n, 0, inf, q^(n^2)/poch(-q, 1, n)^2)"
    assert evaluate(e1, 40) == error_series("E1", 40)
    assert evaluate(e2, 40) == error_series("E2", 40)
    assert evaluate(f, 40) == mock_theta_f(40)


def test_every_catalog_id_has_a_script():
    assert set(shipped_scripts()) == set(cat.CATALOG_IDS)


@pytest.mark.parametrize("iid", cat.CATALOG_IDS)
def test_scripts_match_catalog(iid):
    from qtails.dsl import run_script

    rep = run_script(shipped_scripts()[iid], 30).verdict()
    ref = cat.verify(iid, 30)
    assert (rep.status, rep.first_mismatch, rep.residual_head()) == \
        (ref.status, ref.first_mismatch, ref.residual_head())


def test_script_2_8_fails_at_q1():
    from qtails.dsl import run_script

    rep = run_script(shipped_scripts()["2.8"], 40)
    assert not rep.passed
    assert rep.verdict().first_mismatch == 1


@pytest.mark.parametrize("iid", cat.CATALOG_IDS)
def test_corpus_round_trip(iid):
    text = shipped_scripts()[iid].read_text(encoding="utf-8")
    ast = parse(text)
    assert parse(print_script(ast)) == ast


# ---------------------------------------------------------------------------
# Fuzzed round trip

names = st.sampled_from(["a", "b", "x1", "P", "sig"]).filter(lambda s: s not in KEYWORDS)
leaves = st.one_of(
    st.integers(0, 50).map(Num),
    st.sampled_from([Var("q"), Var("t")]),
    names.map(Name),
)


def _extend(children):
    return st.one_of(
        children.map(Neg),
        st.tuples(st.sampled_from("+-*/"), children, children).map(lambda a: BinOp(*a)),
        st.tuples(children, children).map(lambda a: Pow(*a)),
        st.tuples(st.sampled_from(["poch", "pochinf", "qbinom", "lambert"]), st.lists(children, min_size=4,
                                                                                       max_size=4))
        .map(lambda a: Call(a[0], tuple(a[1][:BUILTINS[a[0]]]))),
        st.tuples(names, children, st.one_of(children, st.just(Inf())), children)
        .map(lambda a: Call("sum", (Name(a[0]), a[1], a[2], a[3]))),
        st.sampled_from(["sigma", "E1", "pairs"]).map(lambda s: Call("catalog", (Str(s),))),
    )


exprs = st.recursive(leaves, _extend, max_leaves=12)


@settings(max_examples=1000, suppress_health_check=[HealthCheck.too_slow])
@given(exprs)
def test_fuzzed_round_trip(e):
    text = to_text(e)
    assert parse_expr(text) == e
    assert to_text(parse_expr(text)) == text
