import random

import pytest
from hypothesis import given, settings, strategies as st

from bethforge.syntax_core import (
    Ap, Eq, Exists, Falsum, Forall, K, LanguageError, Mem, N, ParseError, SortError,
    SortedVar, Succ, Var, Zero, alpha_eq, cantor_pair, cantor_unpair, check_sorts, closure,
    free_vars, godel_decode, godel_encode, neg, num_var, numeral, parse, rename_bound, show,
    sort_of, substitute,
)
from gen import expr, formula

x0, x1 = num_var(0), num_var(1)
F1 = SortedVar(1, 1, "functional")


def test_parse_functional_application():
    assert parse("Ap1(K1, 0) =0 0", "L", 1) == Eq(0, Ap(1, K(1), Zero()), Zero())


def test_parse_membership():
    assert parse("x1 in0 X1", "TI", 1) == Mem(0, Var(x1), Var(SortedVar(1, 1, "set")))


def test_number_is_not_a_functional():
    with pytest.raises(SortError):
        parse("Ap1(x1, 0) =0 0", "L", 1)


def test_membership_outside_set_language():
    with pytest.raises((LanguageError, ParseError)):
        parse("x1 in0 X1", "L", 1)


def test_parse_garbage():
    with pytest.raises(ParseError):
        parse("all x0 x0 = ", "L", 1)


def test_sort_of():
    assert sort_of(parse("all x0. x0 = 0", "L", 1)) == 0
    assert sort_of(parse("Ap1(F1_1, x0) = 0", "L", 1)) == 1
    assert sort_of(parse("all F2_1. Ap2(F2_1, x0) =1 F1_1", "L", 2)) == 1


def test_closure():
    closed = parse("all x0. x0 = 0", "L", 1)
    assert closure(closed) == closed
    c = closure(parse("Ap1(F1_1, x0) = 0", "L", 1))
    assert not free_vars(c)
    inner = c.body.body
    assert inner == Eq(0, Ap(1, Var(F1), Var(x0)), Zero())
    assert {c.var, c.body.var} == {F1, x0}


def test_substitute_examples():
    assert substitute(Eq(0, Var(x0), Zero()), x0, Succ(Zero())) == Eq(0, Succ(Zero()), Zero())
    out = substitute(Exists(x0, Eq(0, Var(x0), Var(x1))), x1, Var(x0))
    assert isinstance(out, Exists) and out.var != x0
    assert out.body == Eq(0, Var(out.var), Var(x0))
    g = substitute(Eq(0, Ap(1, Var(F1), Zero()), Zero()), F1, N(1, K(1)))
    assert g == Eq(0, Ap(1, N(1, K(1)), Zero()), Zero())


def test_godel_examples():
    zz = Eq(0, Zero(), Zero())
    assert godel_decode(godel_encode(zz)) == zz
    assert godel_encode(Zero()) != godel_encode(Succ(Zero()))


def test_cantor_small_table():
    # brute-force oracle: walk the diagonals
    z = 0
    for d in range(30):
        for b in range(d + 1):
            assert cantor_pair(d - b, b) == z
            assert cantor_unpair(z) == (d - b, b)
            z += 1


def test_numeral():
    assert numeral(0) == Zero()
    assert numeral(2) == Succ(Succ(Zero()))


def test_neg_is_implication_to_falsum():
    p = Eq(0, Zero(), Zero())
    assert neg(p).right == Falsum()


def test_alpha_equivalence():
    a = Forall(x0, Eq(0, Var(x0), Zero()))
    b = Forall(x1, Eq(0, Var(x1), Zero()))
    assert alpha_eq(a, b)
    assert not alpha_eq(a, Exists(x1, Eq(0, Var(x1), Zero())))
    assert alpha_eq(rename_bound(a), a)


def test_ill_sorted_equation():
    with pytest.raises(SortError):
        check_sorts(Eq(0, Var(F1), Zero()))


@settings(max_examples=300, deadline=None)
@given(st.integers(min_value=0, max_value=2**32))
def test_print_idempotent_and_round_trip(seed):
    f = formula(random.Random(seed), 2, 4)
    text = show(f)
    g = parse(text, "SLP", 2)
    assert g == f
    assert show(g) == text


@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=0, max_value=2**32), st.integers(0, 2))
def test_expression_round_trip(seed, level):
    e = expr(random.Random(seed), level, 2, 3)
    assert parse(str(e), "SLP", 2, kind="expr") == e
    assert godel_decode(godel_encode(e)) == e


@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=0, max_value=2**32))
def test_godel_round_trip_property(seed):
    f = formula(random.Random(seed), 2, 2)
    assert godel_decode(godel_encode(f)) == f


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**6), st.integers(0, 10**6))
def test_cantor_pair_inverse(a, b):
    assert cantor_unpair(cantor_pair(a, b)) == (a, b)


@settings(max_examples=150, deadline=None)
@given(st.integers(min_value=0, max_value=2**32))
def test_closure_binds_everything(seed):
    f = formula(random.Random(seed), 2, 3, scope=(x0, F1))
    c = closure(f)
    assert not free_vars(c)
    assert sort_of(c) == 0


@settings(max_examples=150, deadline=None)
@given(st.integers(min_value=0, max_value=2**32))
def test_substitution_is_capture_free(seed):
    rng = random.Random(seed)
    f = formula(rng, 1, 3, scope=(x0,))
    t = expr(rng, 0, 1, 2, (x0, x1))
    g = substitute(f, x0, t)
    check_sorts(g)
    expected = (free_vars(f) - {x0}) | (free_vars(t) if x0 in free_vars(f) else set())
    assert free_vars(g) == expected
