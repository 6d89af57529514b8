"""Seeded random generators for set-language formulas and arithmetic terms."""
from __future__ import annotations

import random

from .syntax_core import (
    And, Eq, Exists, Falsum, Forall, Implies, Mem, Or, Plus, SortedVar, Succ, Times, Var, Zero,
)


def _var(i: int, level: int) -> SortedVar:
    return SortedVar(i, level, "number" if level == 0 else "set")


def random_term(rng: random.Random, nums: list, depth: int = 2):
    """An arithmetic term over the numeric variables nums."""
    if depth <= 0 or rng.random() < 0.35:
        if nums and rng.random() < 0.7:
            return Var(rng.choice(nums))
        return Zero()
    op = rng.choice(("S", "S", "+", "*"))
    if op == "S":
        return Succ(random_term(rng, nums, depth - 1))
    cls = Plus if op == "+" else Times
    return cls(random_term(rng, nums, depth - 1), random_term(rng, nums, depth - 1))


class _Gen:
    def __init__(self, rng: random.Random, s: int):
        self.rng = rng
        self.s = s
        self.next = 0

    def fresh(self, level: int) -> SortedVar:
        self.next += 1
        return _var(self.next, level)

    def atom(self, scope: list):
        rng = self.rng
        nums = [v for v in scope if v.level == 0]
        kinds = ["eq0"]
        for n in range(self.s):
            if [v for v in scope if v.level == n + 1]:
                kinds += ["mem"] * 3
        if any(v.level > 0 for v in scope):
            kinds.append("eqn")
        kind = rng.choice(kinds)
        if kind == "eq0":
            if not nums and rng.random() < 0.2:
                return Falsum()
            return Eq(0, random_term(rng, nums, 2), random_term(rng, nums, 1))
        if kind == "eqn":
            v = rng.choice([v for v in scope if v.level > 0])
            same = [w for w in scope if w.level == v.level]
            return Eq(v.level, Var(v), Var(rng.choice(same)))
        sets = [v for v in scope if v.level >= 1]
        x = rng.choice(sets)
        n = x.level - 1
        if n == 0:
            elem = random_term(rng, nums, 1)
        else:
            cands = [v for v in scope if v.level == n]
            if not cands:
                return Eq(0, random_term(rng, nums, 1), random_term(rng, nums, 1))
            elem = Var(rng.choice(cands))
        return Mem(n, elem, Var(x))

    def formula(self, scope: list, depth: int):
        rng = self.rng
        if depth <= 0 or (scope and rng.random() < 0.25):
            return self.atom(scope)
        # closed formulas need binders before atoms can mention variables
        choice = rng.choice(("q", "q", "q", "and", "or", "imp") if len(scope) < 2 else
                            ("q", "and", "or", "imp", "not"))
        if choice == "q":
            v = self.fresh(rng.randint(0, self.s))
            body = self.formula(scope + [v], depth - 1)
            return (Forall if rng.random() < 0.5 else Exists)(v, body)
        if choice == "not":
            return Implies(self.formula(scope, depth - 1), Falsum())
        cls = {"and": And, "or": Or, "imp": Implies}[choice]
        return cls(self.formula(scope, depth - 1), self.formula(scope, depth - 1))


def random_ti_formula(rng: random.Random, s: int = 2, depth: int = 4, free: list | None = None):
    """A formula of the set language of type s with nesting depth at most depth.

    With free=None the result is closed; otherwise it may mention the given variables.
    """
    g = _Gen(rng, s)
    if free:
        g.next = max(v.index for v in free)
    return g.formula(list(free or []), depth)


def ti_corpus(seed: int, count: int, s: int = 2, depth: int = 4) -> list:
    rng = random.Random(seed)
    return [random_ti_formula(rng, s, depth) for _ in range(count)]
