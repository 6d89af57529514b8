import random

import pytest
from hypothesis import given, settings, strategies as st

from bethforge.classical_eval import (
    FunctionalUniverse, TypedUniverse, eval_slp, eval_ti, is_position, set_to_functional,
)
from bethforge.corpus import random_ti_formula
from bethforge.syntax_core import (
    Ap, And, Eq, Exists, Falsum, Forall, Implies, Mem, N, Or, SortedVar, Succ, Var, Zero,
    check_language, free_vars, is_neg, neg as negate, num_var, parse, size, walk,
)
from bethforge.translate import approx, free_var_images, interpret, neg, prime, star

x, y = num_var(1), num_var(2)
X1 = SortedVar(1, 1, "set")
X2 = SortedVar(1, 2, "set")
Z1 = SortedVar(3, 1, "set")
U = TypedUniverse.for_translation(2, 2)
W = FunctionalUniverse.image_of(U)


def ti(text, s=2):
    return parse(text, "TI", s)


def test_approx_base_and_step():
    assert approx(0, x, y) == Eq(0, Var(x), Var(y))
    a = approx(1, SortedVar(1, 1, "set"), SortedVar(2, 1, "set"))
    there, back = a.left, a.right
    assert isinstance(there, Forall) and isinstance(there.body, Implies)
    assert isinstance(there.body.left, Mem) and there.body.left.set == Var(SortedVar(1, 1, "set"))
    inner = there.body.right
    assert isinstance(inner, Exists) and isinstance(inner.body, And)
    assert inner.body.right == Eq(0, Var(there.var), Var(inner.var))
    assert back.body.left.set == Var(SortedVar(2, 1, "set"))
    assert size(approx(2, SortedVar(1, 2, "set"), SortedVar(2, 2, "set"))) > size(a)


def test_approx_level_check():
    with pytest.raises(ValueError):
        approx(1, x, y)


def test_star_examples():
    assert star(Eq(0, Var(x), Var(y))) == Eq(0, Var(x), Var(y))
    assert star(Falsum()) == Falsum()
    out = star(Mem(0, Succ(Var(x)), Var(X1)))
    assert isinstance(out, Exists) and out.var.level == 0
    assert out.body == And(Mem(0, Var(out.var), Var(X1)), Eq(0, Var(out.var), Succ(Var(x))))


def test_prime_examples():
    assert prime(Eq(0, Var(x), Var(y))) == Eq(0, Var(x), Var(y))
    F1 = SortedVar(1, 1, "functional")
    out = prime(Mem(0, Var(x), Var(X1)))
    assert isinstance(out, Exists) and is_position(out.var)
    assert out.body == Eq(0, Ap(1, Var(F1), Var(out.var)), Succ(Var(x)))
    out = prime(Mem(1, Var(Z1), Var(X2)))
    F2, G1 = SortedVar(1, 2, "functional"), SortedVar(3, 1, "functional")
    assert out.body == Eq(1, Ap(2, Var(F2), Var(out.var)), N(1, Var(G1)))


def test_neg_examples():
    zz = Eq(0, Zero(), Zero())
    assert neg(zz) == negate(negate(zz))
    p, q = Eq(0, Var(x), Zero()), Eq(0, Var(y), Zero())
    assert neg(Or(p, q)) == negate(And(negate(neg(p)), negate(neg(q))))
    assert neg(Forall(x, p)) == Forall(x, neg(p))
    assert neg(Exists(x, p)) == negate(Forall(x, negate(neg(p))))


def test_interpret_arithmetic_atom():
    zz = Eq(0, Zero(), Zero())
    tr = interpret(zz)
    assert tr.star == zz and tr.prime == zz
    assert tr.int == negate(negate(zz))
    assert [d["pass"] for d in tr.to_document()] == ["input", "star", "prime", "int"]


def test_interpret_comprehension_instance():
    phi = ti("ex X1. all x0. (x0 in0 X1 <-> x0 = 0)", 1)
    tr = interpret(phi)
    check_language(tr.int, "SLP", 1)
    assert eval_ti(U, phi) is True
    assert eval_slp(W, tr.int) is True
    assert tr.definitions == ()


def test_definitions_reported():
    tr = interpret(ti("all X1_1. all X1_2. X1_1 =1 X1_2 -> X1_2 =1 X1_1"))
    assert tr.definitions == ("~1",)


def test_close_option():
    tr = interpret(ti("x0 in0 X1_1"), close=True)
    assert not free_vars(tr.input) and not free_vars(tr.int)


def _negative_fragment(phi) -> bool:
    return not any(isinstance(n, (Or, Exists, Mem)) for n in walk(phi))


def _translate_env(e):
    out = {}
    for v, val in e.items():
        if v.level == 0:
            out[v] = val
        else:
            out[SortedVar(v.index, v.level, "functional")] = set_to_functional(U, W, val, v.level)
    return out


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32))
def test_int_lands_in_negative_fragment(seed):
    phi = random_ti_formula(random.Random(seed), 2, 4)
    tr = interpret(phi)
    assert _negative_fragment(tr.int)
    check_language(tr.int, "SLP", 2)
    assert not any(isinstance(n, Mem) for n in walk(tr.prime))


@settings(max_examples=120, deadline=None)
@given(st.integers(0, 2**32))
def test_free_variable_discipline(seed):
    rng = random.Random(seed)
    free = [num_var(1), SortedVar(2, 1, "set"), SortedVar(3, 2, "set")]
    phi = random_ti_formula(rng, 2, 3, free=free)
    tr = interpret(phi)
    assert free_vars(tr.star) == free_vars(phi)
    assert free_vars(tr.int) == free_var_images(phi)
    assert not any(is_position(v) for v in free_vars(tr.int))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32))
def test_open_formulas_correspond(seed):
    rng = random.Random(seed)
    free = [num_var(1), SortedVar(2, 1, "set"), SortedVar(3, 2, "set")]
    phi = random_ti_formula(rng, 2, 3, free=free)
    tr = interpret(phi)
    e = {num_var(1): rng.randrange(2), free[1]: rng.choice(U.carrier(1)), free[2]: rng.choice(U.carrier(2))}
    truth = eval_ti(U, phi, e)
    assert eval_ti(U, tr.star, e) == truth
    e2 = _translate_env(e)
    assert eval_slp(W, tr.prime, e2) == truth
    assert eval_slp(W, tr.int, e2) == truth


def test_double_negation_visible():
    tr = interpret(ti("0 = 0 | ~0 = 0"))
    assert is_neg(tr.int)
