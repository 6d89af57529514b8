import dataclasses
import random

import pytest
from hypothesis import given, settings, strategies as st

from bethforge.beth_engine import (
    BethFrame, DomainError, Forcer, UnsupportedError, atom, countermodel_search, dump_frame,
    enumerate_frames, force, force_cs_atom, lem_fixture, load_frame, mp_env, mp_fixture,
    mp_formulas, validate_frame, walks,
)
from bethforge.syntax_core import Falsum, Implies, closure, free_vars, num_var, numeral, parse
from beth_oracle import holds, random_frame
from proof_gen import small_formula

P = parse("p", "L", 0)
LEM = parse("p | ~p", "L", 0)


def f(text, s=0):
    return parse(text, "L", s)


def wide_lem():
    return dataclasses.replace(lem_fixture(), carriers={0: (0, 1, 2, 3)})


def test_single_leaf():
    frame = BethFrame(("a",), "a", {"a": ()}, {"a": frozenset({atom("p")})})
    assert force(frame, None, P)


def test_lem_fixture():
    frame = lem_fixture()
    assert validate_frame(frame) == []
    assert not force(frame, None, LEM)
    assert not force(frame, None, P)
    assert not force(frame, None, f("~p"))
    assert force(frame, ("r", "t"), P)
    assert force(frame, None, f("~~p"))


def test_identity_always_forced():
    frame = lem_fixture()
    for w in walks(frame, 3):
        assert force(frame, w, f("p -> p"))


def test_validate_frame():
    broken = BethFrame(("a", "b"), "a", {"a": ("b",), "b": ()},
                       {"a": frozenset({atom("p")}), "b": frozenset()})
    out = validate_frame(broken)
    assert len(out) == 1 and "'a'" in out[0] and "'b'" in out[0]
    assert validate_frame(BethFrame((), None, {})) == ["no root: the frame has no states"]
    persist = BethFrame(("a", "b"), "a", {"a": ("b",), "b": ()}, funs={"g": {"a": {0: 1}, "b": {0: 0}}})
    assert len(validate_frame(persist)) == 1


def test_countermodels():
    hit = countermodel_search(LEM, 4, 1)
    assert hit is not None and len(hit[0].states) == 2
    assert not force(hit[0], hit[1], LEM)
    assert countermodel_search(f("p -> p"), 3, 1) is None
    dn = countermodel_search(f("~~p -> p"), 4, 1)
    assert dn is not None and not force(dn[0], None, f("~~p -> p"))


def test_lem_needs_two_states():
    # no one-state frame refutes p | ~p
    assert all(force(fr, None, LEM) for fr in enumerate_frames(1, [atom("p")]))


def test_mp_fixture_premises_and_conclusion():
    frame, env = mp_fixture(), mp_env()
    fs = mp_formulas()
    assert force(frame, None, fs["MR1"], env)
    assert not force(frame, None, fs["MR3"], env)


def test_mp_witness_after_a_step():
    frame, env = mp_fixture(), mp_env()
    psi = mp_formulas()["MR3"]
    # once the walk has stepped to o at position 0, x = 1 witnesses
    assert force(frame, ("z", "o"), psi, env)
    assert not force(frame, ("z", "z"), psi, env)


def test_mp_needs_the_functional():
    with pytest.raises(DomainError):
        force(mp_fixture(), None, mp_formulas()["MR1"])


def test_proves_atoms():
    frame = wide_lem()
    assert force_cs_atom(frame, ("r", "t"), numeral(1), P)
    assert force_cs_atom(frame, ("r", "r", "t"), numeral(2), P)
    # depth-1 prefix r does not force p: false from there on
    for w in [("r", "r"), ("r", "r", "r"), ("r", "r", "t"), ("r", "r", "r", "t")]:
        assert not force_cs_atom(frame, w, numeral(1), P)
    for w in walks(frame, 3):
        for z in range(4):
            assert not force_cs_atom(frame, w, numeral(z), Falsum())


def test_proves_at_current_length():
    frame = wide_lem()
    for w in walks(frame, 3):
        z = len(w) - 1
        expected = force(frame, w, P)
        assert force_cs_atom(frame, w, numeral(z), P) == expected


def test_membership_unsupported():
    phi = parse("0 in0 X1", "TI", 1)
    frame = dataclasses.replace(lem_fixture(), carriers={0: (0,), 1: ("a",)})
    with pytest.raises(UnsupportedError):
        force(frame, None, phi, {next(iter(free_vars(phi))): "a"})


def test_bad_walk_and_env():
    with pytest.raises(DomainError):
        force(lem_fixture(), ("t",), P)
    with pytest.raises(DomainError):
        force(lem_fixture(), None, parse("x0 = 0", "L", 0), {num_var(0): 5})


def test_frame_text_round_trip():
    frame = lem_fixture()
    again = load_frame(dump_frame(frame))
    assert again.states == frame.states and again.succ == frame.succ
    assert all(again.atoms_at(s) == frame.atoms_at(s) for s in frame.states)
    text = "states a b\nroot a\nsucc a: a b\ntrue b: p q(1)\ncarrier 0: 0 1\n"
    fr = load_frame(text)
    assert atom("q", 1) in fr.atoms_at("b")
    assert force(fr, None, f("~~ex x0. q(x0)"))
    with pytest.raises(DomainError):
        load_frame("bogus line")


SCHEMAS = [f("p | ~p"), f("~~p -> p"), f("(p -> q) | (q -> p)"), f("~p | ~~p"),
           f("all x0. (r(x0) | ~r(x0))"), f("~~(ex x0. r(x0)) -> ex x0. r(x0)")]


@settings(max_examples=120, deadline=None)
@given(st.integers(0, 2**32), st.integers(1, 2))
def test_agrees_with_state_oracle(seed, carrier):
    rng = random.Random(seed)
    frame = random_frame(rng, 4, carrier)
    forcer = Forcer(frame)
    phis = SCHEMAS + [small_formula(rng, 3) for _ in range(6)]
    for phi in map(closure, phis):
        for w in walks(frame, 3):
            assert forcer.forced(phi, w) == holds(frame, w[-1], phi, {}), (phi, w)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32))
def test_monotone_along_walks(seed):
    rng = random.Random(seed)
    frame = random_frame(rng, 4, 2)
    forcer = Forcer(frame)
    phi = closure(small_formula(rng, 3))
    for w in walks(frame, 3):
        if forcer.forced(phi, w):
            for t in frame.succ[w[-1]]:
                assert forcer.forced(phi, w + (t,))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32))
def test_implication_reflexive(seed):
    rng = random.Random(seed)
    frame = random_frame(rng, 4, 2)
    phi = closure(small_formula(rng, 3))
    assert force(frame, None, Implies(phi, phi))
