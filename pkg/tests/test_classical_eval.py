import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from bethforge.classical_eval import (
    CapacityError, FunctionalUniverse, TypedUniverse, UnboundVariable, arval, cross_check,
    eval_slp, eval_ti, pair_decode, pair_encode, seq_decode, seq_encode, set_to_functional, tr,
)
from bethforge.corpus import random_term, ti_corpus
from bethforge.syntax_core import (
    And, Ap, Eq, Exists, Falsum, Forall, Implies, K, Mem, N, Or, Plus, SortedVar, Succ, Times, Var,
    Zero, cantor_pair, godel_encode, num_var, parse,
)

x0 = num_var(0)


def ti(text, s=2):
    return parse(text, "TI", s)


# ---------------------------------------------------------------- second route

def naive_term(t, e, top):
    if isinstance(t, Zero):
        return 0
    if isinstance(t, Var):
        return e[t.var]
    if isinstance(t, Succ):
        return min(naive_term(t.arg, e, top) + 1, top)
    a, b = naive_term(t.left, e, top), naive_term(t.right, e, top)
    return min(a + b if isinstance(t, Plus) else a * b, top)


def naive_sets(n_numbers, level):
    """Level-k carrier built by hand: subsets as frozensets."""
    xs = list(range(n_numbers))
    for _ in range(level):
        xs = [frozenset(c) for r in range(len(xs) + 1) for c in itertools.combinations(xs, r)]
    return xs


def naive_truth(phi, e, n, top):
    if isinstance(phi, Falsum):
        return False
    if isinstance(phi, Eq):
        if phi.level == 0:
            return naive_term(phi.left, e, top) == naive_term(phi.right, e, top)
        return e[phi.left.var] == e[phi.right.var]
    if isinstance(phi, Mem):
        el = naive_term(phi.elem, e, top) if phi.level == 0 else e[phi.elem.var]
        return el in e[phi.set.var]
    if isinstance(phi, And):
        return naive_truth(phi.left, e, n, top) and naive_truth(phi.right, e, n, top)
    if isinstance(phi, Or):
        return naive_truth(phi.left, e, n, top) or naive_truth(phi.right, e, n, top)
    if isinstance(phi, Implies):
        return not naive_truth(phi.left, e, n, top) or naive_truth(phi.right, e, n, top)
    dom = naive_sets(n, phi.var.level)
    test = all if isinstance(phi, Forall) else any
    return test(naive_truth(phi.body, {**e, phi.var: d}, n, top) for d in dom)


# ---------------------------------------------------------------- examples

def test_eval_ti_examples():
    U2, U3 = TypedUniverse(2, 2), TypedUniverse(2, 3)
    assert eval_ti(U2, ti("0 = 0"))
    assert eval_ti(U2, ti("ex X1. all x0. (x0 in0 X1 <-> x0 = 0)"))
    assert eval_ti(U3, ti("all x0. ~S(x0) = 0"))
    assert not eval_ti(U2, ti("all x0. x0 = 0"))


def test_carrier_sizes():
    U = TypedUniverse(2, 2)
    assert [len(U.carrier(k)) for k in range(3)] == [2, 4, 16]
    with pytest.raises(CapacityError):
        TypedUniverse(3, 3)


def test_unbound():
    with pytest.raises(UnboundVariable):
        eval_ti(TypedUniverse(1, 2), ti("x0 = 0"))


def test_eval_slp_examples():
    W = FunctionalUniverse(2, 2)
    assert eval_slp(W, Eq(0, Ap(1, K(1), Zero()), Zero()))
    assert not eval_slp(W, Eq(1, N(1, K(1)), K(1)))
    U = TypedUniverse(1, 2)
    img = FunctionalUniverse.image_of(U)
    F = SortedVar(1, 1, "functional")
    f1 = set_to_functional(U, img, frozenset({1}), 1)
    w = SortedVar(5000, 0, "number")
    assert eval_slp(img, Exists(w, Eq(0, Ap(1, Var(F), Var(w)), Succ(Succ(Zero())))), {F: f1})


def test_set_to_functional_examples():
    U = TypedUniverse(1, 2)
    W = FunctionalUniverse(1, 3)
    assert set_to_functional(U, W, frozenset(), 1) == (0, 0, 0, 0)
    assert set_to_functional(U, W, frozenset({0}), 1) == (1, 0, 0, 0)


@pytest.mark.parametrize("level", [1, 2])
def test_membership_survives_coding(level):
    U = TypedUniverse(2, 2)
    W = FunctionalUniverse.image_of(U)
    for x in U.carrier(level):
        fx = set_to_functional(U, W, x, level)
        for z in U.carrier(level - 1):
            code = W.shift(level - 1, set_to_functional(U, W, z, level - 1))
            assert (z in x) == (code in fx)


def test_coding_is_injective():
    U = TypedUniverse(2, 2)
    W = FunctionalUniverse.image_of(U)
    for k in (1, 2):
        codes = [set_to_functional(U, W, x, k) for x in U.carrier(k)]
        assert len(set(codes)) == len(codes)


# ---------------------------------------------------------------- codings

def test_level0_pair_is_cantor():
    assert pair_encode(0, 0, 0) == 0
    for a in range(6):
        for b in range(6):
            assert pair_encode(0, a, b) == (a + b) * (a + b + 1) // 2 + b == cantor_pair(a, b)


@pytest.mark.parametrize("level", [0, 1, 2])
def test_pairs_exhaustive(level):
    U = TypedUniverse(2, 2)
    seen = {}
    for a in U.carrier(level):
        for b in U.carrier(level):
            p = pair_encode(level, a, b)
            assert pair_decode(level, p) == (a, b)
            assert seen.setdefault(p, (a, b)) == (a, b)


@pytest.mark.parametrize("level", [0, 1, 2])
def test_sequences(level):
    U = TypedUniverse(2, 2)
    car = U.carrier(level)
    for length in range(3):
        for xs in itertools.product(car[:6], repeat=length):
            assert seq_decode(level, seq_encode(level, list(xs))) == list(xs)


def test_capacity_is_checked():
    with pytest.raises(CapacityError):
        pair_encode(0, 3, 3, cap=10)


def test_cross_check_clean():
    U = TypedUniverse(2, 2)
    e = {num_var(1): 1, num_var(2): 0, SortedVar(1, 1, "set"): frozenset({0}),
         SortedVar(2, 2, "set"): frozenset({frozenset(), frozenset({1})})}
    assert cross_check(e, {0: 1, 1: frozenset({1}), 2: frozenset()}) == []
    assert U.top == 1


# ---------------------------------------------------------------- codes

def test_arval_examples():
    assert arval(godel_encode(Zero()), {}) == 0
    for i in range(4):
        assert arval(godel_encode(Var(num_var(i))), {num_var(i): 7 + i}) == 7 + i


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32))
def test_arval_matches_direct_evaluation(seed):
    rng = random.Random(seed)
    nums = [num_var(i) for i in range(3)]
    t = random_term(rng, nums, 4)
    f = {v: rng.randint(0, 5) for v in nums}
    assert arval(godel_encode(t), f) == naive_term(t, f, 10**9)
    assert arval(godel_encode(t), f, cap=3) == naive_term(t, f, 3)


def test_tr_falsum():
    assert tr(TypedUniverse(1, 2), godel_encode(Falsum())) is False


def test_tr_and_eval_on_corpus():
    U = TypedUniverse(2, 2)
    for phi in ti_corpus(11, 120):
        v = eval_ti(U, phi)
        assert tr(U, godel_encode(phi)) == v
        assert naive_truth(phi, {}, 2, U.top) == v


def test_tr_rejects_non_formula():
    from bethforge.syntax_core import DecodeError
    with pytest.raises(DecodeError):
        tr(TypedUniverse(1, 2), godel_encode(Zero()))


def test_times_saturates():
    U = TypedUniverse(0, 3)
    assert eval_ti(U, Eq(0, Times(Succ(Succ(Zero())), Succ(Succ(Zero()))), Succ(Succ(Zero()))))
    assert eval_ti(U, Forall(x0, Implies(Eq(0, Succ(Var(x0)), Zero()), Falsum())))
    assert not eval_ti(U, And(Eq(0, Zero(), Zero()), Or(Falsum(), Falsum())))
