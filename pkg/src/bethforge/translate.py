"""The interpretation of the typed set theory in the functional theory.

Three passes: star replaces equality and membership by the extensional
relation x ~n y, prime turns sets into functionals that enumerate their
shifted members, neg is the negative translation.  int = neg . prime . star.
"""
from __future__ import annotations

from dataclasses import dataclass

from .classical_eval import POSITION_BLOCK, is_position
from .syntax_core import (
    _ALIAS_BLOCK, Ap, And, Eq, Exists, Falsum, Forall, Implies, Mem, N, Or, Pred, Proves,
    SortedVar, Succ, Var, all_vars, check_sorts, closure, free_vars, neg as negate, show,
)


class _Fresh:
    """Hands out variables that occur nowhere in the input."""

    def __init__(self, *nodes):
        used = set()
        for node in nodes:
            used |= {v.index for v in all_vars(node)}
        self.next = max(used, default=0) + 1
        self.next_pos = max((i - POSITION_BLOCK for i in used
                             if POSITION_BLOCK <= i < POSITION_BLOCK + _ALIAS_BLOCK), default=-1) + 1

    def var(self, level: int) -> SortedVar:
        i = self.next
        if POSITION_BLOCK <= i < POSITION_BLOCK + _ALIAS_BLOCK:
            i = POSITION_BLOCK + _ALIAS_BLOCK
        self.next = i + 1
        return SortedVar(i, level, "number" if level == 0 else "set")

    def position(self) -> SortedVar:
        i = self.next_pos
        if i >= _ALIAS_BLOCK:
            raise ValueError("ran out of position variables")
        self.next_pos += 1
        return SortedVar(POSITION_BLOCK + i, 0, "number")


def _ball(v: SortedVar, s, body):
    return Forall(v, Implies(Mem(v.level, Var(v), s), body))


def _bex(v: SortedVar, s, body):
    return Exists(v, And(Mem(v.level, Var(v), s), body))


def _approx(n: int, x, y, fresh: _Fresh):
    if n == 0:
        return Eq(0, x, y)
    z, u = fresh.var(n - 1), fresh.var(n - 1)
    there = _ball(z, x, _bex(u, y, _approx(n - 1, Var(z), Var(u), fresh)))
    z2, u2 = fresh.var(n - 1), fresh.var(n - 1)
    back = _ball(z2, y, _bex(u2, x, _approx(n - 1, Var(z2), Var(u2), fresh)))
    return And(there, back)


def approx(n: int, x: SortedVar, y: SortedVar):
    """x ~n y fully expanded: equality at level 0, mutual inclusion up to ~(n-1) above."""
    for v in (x, y):
        if v.level != n:
            raise ValueError(f"{v} is not of level {n}")
    return _approx(n, Var(x), Var(y), _Fresh(Var(x), Var(y)))


def _star(phi, fresh: _Fresh, defs: list):
    if isinstance(phi, Falsum):
        return phi
    if isinstance(phi, Eq):
        if phi.level > 0:
            defs.append(f"~{phi.level}")
        return _approx(phi.level, phi.left, phi.right, fresh)
    if isinstance(phi, Mem):
        z = fresh.var(phi.level)
        if phi.level > 0:
            defs.append(f"~{phi.level}")
        return _bex(z, phi.set, _approx(phi.level, Var(z), phi.elem, fresh))
    if isinstance(phi, (And, Or, Implies)):
        return type(phi)(_star(phi.left, fresh, defs), _star(phi.right, fresh, defs))
    if isinstance(phi, (Forall, Exists)):
        return type(phi)(phi.var, _star(phi.body, fresh, defs))
    raise ValueError(f"{type(phi).__name__} is not a formula of the set language")


def star(phi):
    """Extensional collapse: =n becomes ~n, t in tau becomes (ex z in tau) z ~n t."""
    check_sorts(phi)
    return _star(phi, _Fresh(phi), [])


def _prime_var(v: SortedVar) -> SortedVar:
    return v if v.level == 0 else SortedVar(v.index, v.level, "functional")


def _prime_term(t):
    if isinstance(t, Var):
        return Var(_prime_var(t.var))
    if isinstance(t, Succ):
        return Succ(_prime_term(t.arg))
    if hasattr(t, "left"):
        return type(t)(_prime_term(t.left), _prime_term(t.right))
    return t


def _prime(phi, fresh: _Fresh):
    if isinstance(phi, Falsum):
        return phi
    if isinstance(phi, Eq):
        return Eq(phi.level, _prime_term(phi.left), _prime_term(phi.right))
    if isinstance(phi, Mem):
        n = phi.level
        w = fresh.position()
        code = Succ(_prime_term(phi.elem)) if n == 0 else N(n, _prime_term(phi.elem))
        return Exists(w, Eq(n, Ap(n + 1, _prime_term(phi.set), Var(w)), code))
    if isinstance(phi, (And, Or, Implies)):
        return type(phi)(_prime(phi.left, fresh), _prime(phi.right, fresh))
    if isinstance(phi, (Forall, Exists)):
        return type(phi)(_prime_var(phi.var), _prime(phi.body, fresh))
    raise ValueError(f"{type(phi).__name__} is not a formula of the set language")


def prime(phi):
    """Sets to functionals: level-n set variables become functional variables of level n,
    and t in tau becomes ex w [tau(w) = S(t)] (level 0) or ex w [tau(w) = N^n(t)]."""
    check_sorts(phi)
    return _prime(phi, _Fresh(phi))


def neg(phi):
    """Negative translation: atoms doubly negated, or and ex through de Morgan."""
    if isinstance(phi, Falsum):
        return phi
    if isinstance(phi, (Eq, Mem, Pred, Proves)):
        return negate(negate(phi))
    if isinstance(phi, (And, Implies)):
        return type(phi)(neg(phi.left), neg(phi.right))
    if isinstance(phi, Or):
        return negate(And(negate(neg(phi.left)), negate(neg(phi.right))))
    if isinstance(phi, Forall):
        return Forall(phi.var, neg(phi.body))
    if isinstance(phi, Exists):
        return negate(Forall(phi.var, negate(neg(phi.body))))
    raise ValueError(f"not a formula: {phi!r}")


@dataclass(frozen=True)
class TranslationTrace:
    input: object
    star: object
    prime: object
    neg: object
    definitions: tuple = ()

    @property
    def int(self):
        return self.neg

    def to_document(self) -> list[dict]:
        return [{"pass": name, "formula": show(f)} for name, f in
                (("input", self.input), ("star", self.star), ("prime", self.prime), ("int", self.neg))]


def interpret(phi, close: bool = False) -> TranslationTrace:
    """Run the three passes; with close=True the universal closure is translated."""
    check_sorts(phi)
    src = closure(phi) if close else phi
    defs: list = []
    s = _star(src, _Fresh(src), defs)
    p = _prime(s, _Fresh(s))
    return TranslationTrace(src, s, p, neg(p), tuple(sorted(set(defs))))


def free_var_images(phi) -> set:
    """Images under prime of phi's free variables."""
    return {_prime_var(v) for v in free_vars(phi)}


__all__ = ["approx", "star", "prime", "neg", "interpret", "TranslationTrace", "free_var_images",
           "is_position"]
