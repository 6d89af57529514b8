"""Natural-deduction proofs and axiom schemas.

Proofs are sequent-annotated natural-deduction trees for intuitionistic
predicate logic with equality (double-negation elimination switches on the
classical calculus).  Equality is handled by two congruence rules rather
than axioms.  Each axiom family has a builder that produces the open body
of an instance from a parts record, and a recognizer that pulls the parts
back out of a candidate and rebuilds it, so that recognition can never be
more permissive than instantiation.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Iterable

from .syntax_core import (
    And, Ap, BethForgeError, Eq, Exists, Expr, Falsum, Forall, Formula, Implies,
    K, LanguageError, Mem, N, Or, Plus, Pred, Proves, SortedVar, Succ, Times, Var,
    Zero, _Parser, alpha_eq, check_language, check_sorts, closure, expr_level,
    free_vars, iff, is_neg, neg, parse, rename_bound, sort_of, substitute,
    walk,
)

THEORIES = ("L", "LP", "SLP", "TI", "TIstar")


class RuleError(BethForgeError):
    def __init__(self, node, reason: str):
        self.node = node
        ident = getattr(node, "id", None)
        where = f"node {ident}: " if ident is not None else ""
        super().__init__(f"{where}{reason}")


class EigenvariableError(RuleError):
    pass


class AxiomError(RuleError):
    pass


class SideConditionError(BethForgeError):
    pass


@dataclass(frozen=True)
class Theory:
    id: str
    s: int

    def __post_init__(self):
        if self.id not in THEORIES:
            raise ValueError(f"unknown theory {self.id!r}")
        if self.s < 0:
            raise ValueError("s must be >= 0")

    @property
    def language(self) -> str:
        return {"TIstar": "TI"}.get(self.id, self.id)

    @property
    def classical(self) -> bool:
        return self.id in ("TI", "TIstar")

    def __str__(self):
        return f"{self.id}_{self.s}"


@dataclass(frozen=True)
class AxiomId:
    family: str
    parts: tuple = ()

    def get(self, key, default=None):
        return dict(self.parts).get(key, default)

    def __str__(self):
        return self.family


# ---------------------------------------------------------------- helpers

def _v(x) -> Expr:
    return x if not isinstance(x, SortedVar) else Var(x)


def _fresh(level: int, kind: str, avoid: Iterable) -> SortedVar:
    used = set()
    for node in avoid:
        for n in walk(node):
            if isinstance(n, Var):
                used.add(n.var.index)
            elif isinstance(n, (Forall, Exists)):
                used.add(n.var.index)
    i = 0
    while i in used:
        i += 1
    return SortedVar(i, level, kind)


def le(a: Expr, b: Expr) -> Formula:
    """a <= b as ex w. a + w = b."""
    w = _fresh(0, "number", [a, b])
    return Exists(w, Eq(0, Plus(a, Var(w)), b))


def lt(a: Expr, b: Expr) -> Formula:
    """a < b as ex w. a + S(w) = b."""
    w = _fresh(0, "number", [a, b])
    return Exists(w, Eq(0, Plus(a, Succ(Var(w))), b))


def app_down(f: Expr, x: Expr, zeros: int) -> Expr:
    """F(x)(0)...(0) with the given number of trailing zero arguments."""
    lv = expr_level(f)
    out = Ap(lv, f, x)
    for _ in range(zeros):
        lv -= 1
        out = Ap(lv, out, Zero())
    return out


def seg_eq(g: SortedVar, h: SortedVar, y: Expr) -> Formula:
    """The first y values of g and h agree."""
    z = _fresh(0, "number", [Var(g), Var(h), y])
    n = g.level
    return Forall(z, Implies(lt(Var(z), y), Eq(n - 1, Ap(n, Var(g), Var(z)), Ap(n, Var(h), Var(z)))))


def exists_unique(g: SortedVar, phi: Formula) -> Formula:
    g2 = _fresh(g.level, g.kind, [phi, Var(g)])
    return Exists(g, And(phi, Forall(g2, Implies(substitute(phi, g, Var(g2)), Eq(g.level, Var(g2), Var(g))))))


def _num(e) -> bool:
    return isinstance(e, Var) and e.var.kind == "number"


def _succ_n(n: int, e: Expr) -> Expr:
    return Succ(e) if n == 0 else N(n, e)


def _no_proves(phi) -> bool:
    return not any(isinstance(n, Proves) for n in walk(phi))


def _no_lawless(phi) -> bool:
    for n in walk(phi):
        v = n.var if isinstance(n, (Var, Forall, Exists)) else None
        if v is not None and v.kind == "lawless":
            return False
    return True


def _is_L(phi) -> bool:
    return _no_proves(phi) and _no_lawless(phi) and not any(isinstance(n, Mem) for n in walk(phi))


def _lawless_restriction(phi, keep: SortedVar, n: int) -> bool:
    # parameters of type n must be lawlike, apart from keep
    return all(v == keep or v.level != n or v.kind == "lawlike" for v in free_vars(phi))


# ---------------------------------------------------------------- families
# Each family: build(parts) -> open body, raising SideConditionError;
# extract(body) -> candidate parts dicts.

def _need(cond: bool, msg: str):
    if not cond:
        raise SideConditionError(msg)


def _b_succ(p):
    x, y = p["x"], p.get("y")
    if p.get("part", "a") == "a":
        return neg(Eq(0, Succ(Var(x)), Zero()))
    _need(x != y, "x and y must differ")
    return Implies(Eq(0, Succ(Var(x)), Succ(Var(y))), Eq(0, Var(x), Var(y)))


def _x_succ(b):
    if is_neg(b) and isinstance(b.left, Eq) and isinstance(b.left.left, Succ) and _num(b.left.left.arg):
        yield {"part": "a", "x": b.left.left.arg.var}
    if isinstance(b, Implies) and isinstance(b.right, Eq) and _num(b.right.left) and _num(b.right.right):
        yield {"part": "b", "x": b.right.left.var, "y": b.right.right.var}


def _b_plus(p):
    x, y = Var(p["x"]), Var(p.get("y", p["x"]))
    if p.get("part", "a") == "a":
        return Eq(0, Plus(x, Zero()), x)
    _need(p["x"] != p["y"], "x and y must differ")
    return Eq(0, Plus(x, Succ(y)), Succ(Plus(x, y)))


def _x_plus(b):
    if isinstance(b, Eq) and isinstance(b.left, Plus) and _num(b.left.left):
        yield {"part": "a", "x": b.left.left.var}
        if isinstance(b.left.right, Succ) and _num(b.left.right.arg):
            yield {"part": "b", "x": b.left.left.var, "y": b.left.right.arg.var}


def _b_times(p):
    x, y = Var(p["x"]), Var(p.get("y", p["x"]))
    if p.get("part", "a") == "a":
        return Eq(0, Times(x, Zero()), Zero())
    _need(p["x"] != p["y"], "x and y must differ")
    return Eq(0, Times(x, Succ(y)), Plus(Times(x, y), x))


def _x_times(b):
    if isinstance(b, Eq) and isinstance(b.left, Times) and _num(b.left.left):
        yield {"part": "a", "x": b.left.left.var}
        if isinstance(b.left.right, Succ) and _num(b.left.right.arg):
            yield {"part": "b", "x": b.left.left.var, "y": b.left.right.arg.var}


def _b_induction(p):
    phi, x = p["phi"], p["x"]
    _need(x.kind == "number", "induction variable must be numeric")
    return Implies(And(substitute(phi, x, Zero()),
                       Forall(x, Implies(phi, substitute(phi, x, Succ(Var(x)))))),
                   Forall(x, phi))


def _x_induction(b):
    if isinstance(b, Implies) and isinstance(b.left, And) and isinstance(b.left.right, Forall) \
            and isinstance(b.left.right.body, Implies):
        yield {"phi": b.left.right.body.left, "x": b.left.right.var}


def _b_l5(p):
    n = p["n"]
    if p.get("part", "a") == "a":
        x = p["x"]
        return Eq(n, Ap(n + 1, K(n + 1), Var(x)), K(n) if n else Zero())
    f = p["F"]
    _need(f.level == n and n >= 1, "F must be an n-functional with n >= 1")
    return neg(Eq(n, N(n, Var(f)), K(n)))


def _x_l5(b):
    if isinstance(b, Eq) and isinstance(b.left, Ap) and _num(b.left.arg):
        yield {"part": "a", "n": b.level, "x": b.left.arg.var}
    if is_neg(b) and isinstance(b.left, Eq) and isinstance(b.left.left, N) and isinstance(b.left.left.arg, Var):
        yield {"part": "b", "n": b.left.level, "F": b.left.left.arg.var}


def _b_l6(p):
    n = p["n"]
    f = p["F"]
    if p.get("part", "a") == "a":
        x = p["x"]
        _need(f.level == n + 1, "F must have level n+1")
        return Eq(n, Ap(n + 1, N(n + 1, Var(f)), Var(x)), _succ_n(n, Ap(n + 1, Var(f), Var(x))))
    g = p["G"]
    _need(n >= 1 and f.level == n and g.level == n, "F, G must be n-functionals")
    _need(f != g, "F and G must differ")
    return Implies(Eq(n, N(n, Var(f)), N(n, Var(g))), Eq(n, Var(f), Var(g)))


def _x_l6(b):
    if isinstance(b, Eq) and isinstance(b.left, Ap) and isinstance(b.left.fun, N) \
            and isinstance(b.left.fun.arg, Var) and _num(b.left.arg):
        yield {"part": "a", "n": b.level, "F": b.left.fun.arg.var, "x": b.left.arg.var}
    if isinstance(b, Implies) and isinstance(b.right, Eq) and isinstance(b.right.left, Var) \
            and isinstance(b.right.right, Var):
        yield {"part": "b", "n": b.right.level, "F": b.right.left.var, "G": b.right.right.var}


def _b_l7(p):
    a, x, t = p["A"], p["x"], p["t"]
    _need(a.kind == "lawlike" and a.level == 1, "A must be a lawlike 1-functional")
    _need(expr_level(t) == 0, "t must be numeric")
    bad = [v for v in free_vars(t) if not (v.kind == "number" or (v.kind == "lawlike" and v.level == 1))]
    _need(not bad, f"t may only contain numeric and lawlike level-1 variables, found {bad and bad[0]}")
    _need(a not in free_vars(t), "A must not occur in t")
    return Exists(a, Forall(x, Eq(0, Ap(1, Var(a), Var(x)), t)))


def _x_l7(b):
    if isinstance(b, Exists) and isinstance(b.body, Forall) and isinstance(b.body.body, Eq):
        yield {"A": b.var, "x": b.body.var, "t": b.body.body.right}


def _b_equality(p):
    part = p.get("part", "refl")
    if part == "refl":
        return Eq(p["n"], p["t"], p["t"])
    x, y = Var(p["x"]), Var(p["y"])
    n = p["x"].level
    _need(p["y"].level == n, "levels must agree")
    if part == "sym":
        return Implies(Eq(n, x, y), Eq(n, y, x))
    z = Var(p["z"])
    _need(p["z"].level == n, "levels must agree")
    return Implies(Eq(n, x, y), Implies(Eq(n, y, z), Eq(n, x, z)))


def _x_equality(b):
    if isinstance(b, Eq) and b.left == b.right:
        yield {"part": "refl", "n": b.level, "t": b.left}
    if isinstance(b, Implies) and isinstance(b.left, Eq) and isinstance(b.left.left, Var) \
            and isinstance(b.left.right, Var):
        yield {"part": "sym", "x": b.left.left.var, "y": b.left.right.var}
        if isinstance(b.right, Implies) and isinstance(b.right.right, Eq) and isinstance(b.right.right.right, Var):
            yield {"part": "trans", "x": b.left.left.var, "y": b.left.right.var, "z": b.right.right.right.var}


def _b_cs1(p):
    z, phi = p["z"], p["phi"]
    _need(_is_L(phi), "the proved formula must be a formula of L")
    return Or(Proves(Var(z), phi), neg(Proves(Var(z), phi)))


def _x_cs1(b):
    if isinstance(b, Or) and isinstance(b.left, Proves) and _num(b.left.term):
        yield {"z": b.left.term.var, "phi": b.left.inner}


def _b_cs2(p):
    z, y, phi = p["z"], p["y"], p["phi"]
    _need(_is_L(phi), "the proved formula must be a formula of L")
    return Implies(Proves(Var(z), phi), Proves(Plus(Var(z), Var(y)), phi))


def _x_cs2(b):
    if isinstance(b, Implies) and isinstance(b.left, Proves) and isinstance(b.right, Proves) \
            and _num(b.left.term) and isinstance(b.right.term, Plus) and _num(b.right.term.right):
        yield {"z": b.left.term.var, "y": b.right.term.right.var, "phi": b.left.inner}


def _b_cs3(p):
    z, phi = p["z"], p["phi"]
    _need(_is_L(phi), "the proved formula must be a formula of L")
    _need(z not in free_vars(phi), "z must not be a parameter of phi")
    return iff(Exists(z, Proves(Var(z), phi)), phi)


def _x_cs3(b):
    if isinstance(b, And) and isinstance(b.left, Implies) and isinstance(b.left.left, Exists) \
            and isinstance(b.left.left.body, Proves):
        yield {"z": b.left.left.var, "phi": b.left.right}


def _b_ll1(p):
    lf, f, x, y = p["LF"], p["F"], p["x"], p["y"]
    n = lf.level
    _need(lf.kind == "lawless", "the bound functional must be lawless")
    _need(f.level == n and f.kind != "lawless", "F must be an arbitrary n-functional")
    _need(x != y, "x and y must differ")
    return Exists(lf, Forall(y, Implies(le(Var(y), Var(x)),
                                        Eq(n - 1, Ap(n, Var(lf), Var(y)), Ap(n, Var(f), Var(y))))))


def _x_ll1(b):
    if isinstance(b, Exists) and isinstance(b.body, Forall) and isinstance(b.body.body, Implies):
        imp = b.body.body
        if isinstance(imp.left, Exists) and isinstance(imp.left.body, Eq) and _num(imp.left.body.right) \
                and isinstance(imp.right, Eq) and isinstance(imp.right.right, Ap) \
                and isinstance(imp.right.right.fun, Var):
            yield {"LF": b.var, "y": b.body.var, "x": imp.left.body.right.var,
                   "F": imp.right.right.fun.var}


def _b_ll2(p):
    f, g = p["F"], p["G"]
    _need(f.kind == "lawless" and g.kind == "lawless", "both functionals must be lawless")
    _need(f.level == g.level, "levels must agree")
    _need(f != g, "the two lawless variables must differ")
    e = Eq(f.level, Var(f), Var(g))
    return Or(e, neg(e))


def _x_ll2(b):
    if isinstance(b, Or) and isinstance(b.left, Eq) and isinstance(b.left.left, Var) \
            and isinstance(b.left.right, Var):
        yield {"F": b.left.left.var, "G": b.left.right.var}


def _b_ll3(p):
    phi, h, g, x = p["phi"], p["H"], p["G"], p["x"]
    n = h.level
    _need(h.kind == "lawless" and g.kind == "lawless" and g.level == n, "H and G must be lawless n-functionals")
    _need(sort_of(phi) <= n, f"sort(phi) must be <= {n}")
    _need(_lawless_restriction(phi, h, n), "phi has a non-lawlike parameter of type n other than H")
    _need(g not in free_vars(phi) and x not in free_vars(phi), "G and x must not be parameters of phi")
    return Implies(phi, Exists(x, Forall(g, Implies(seg_eq(g, h, Var(x)), substitute(phi, h, Var(g))))))


def _x_ll3(b):
    if isinstance(b, Implies) and isinstance(b.right, Exists) and isinstance(b.right.body, Forall):
        inner = b.right.body.body
        if isinstance(inner, Implies) and isinstance(inner.left, Forall) \
                and isinstance(inner.left.body, Implies) and isinstance(inner.left.body.right, Eq):
            rhs = inner.left.body.right.right
            if isinstance(rhs, Ap) and isinstance(rhs.fun, Var):
                yield {"phi": b.left, "H": rhs.fun.var, "G": b.right.body.var, "x": b.right.var}


def _b_c1(p):
    phi, x, y, f = p["phi"], p["x"], p["y"], p["F"]
    m = f.level
    _need(m >= max(sort_of(phi), 1), f"m must be >= max(sort(phi),1) = {max(sort_of(phi), 1)}")
    _need(f not in free_vars(phi), "F must not be a parameter of phi")
    _need(x != y and x.kind == y.kind == "number", "x, y must be distinct numeric variables")
    inst = substitute(phi, y, app_down(Var(f), Var(x), m - 1))
    return Implies(Forall(x, Exists(y, phi)), Exists(f, Forall(x, inst)))


def _x_c1(b):
    if isinstance(b, Implies) and isinstance(b.left, Forall) and isinstance(b.left.body, Exists) \
            and isinstance(b.right, Exists):
        yield {"phi": b.left.body.body, "x": b.left.var, "y": b.left.body.var, "F": b.right.var}


def _b_c2(p):
    phi, x, g, f = p["phi"], p["x"], p["G"], p["F"]
    m, n = f.level, g.level
    _need(m >= max(sort_of(phi), n + 1), f"m must be >= max(sort(phi),n+1) = {max(sort_of(phi), n + 1)}")
    _need(f not in free_vars(phi), "F must not be a parameter of phi")
    inst = substitute(phi, g, app_down(Var(f), Var(x), m - n - 1))
    return Implies(Forall(x, exists_unique(g, phi)), Exists(f, Forall(x, inst)))


def _x_c2(b):
    if isinstance(b, Implies) and isinstance(b.left, Forall) and isinstance(b.left.body, Exists) \
            and isinstance(b.left.body.body, And) and isinstance(b.right, Exists):
        yield {"phi": b.left.body.body.left, "x": b.left.var, "G": b.left.body.var, "F": b.right.var}


def _b_ks(p):
    phi, g, x = p["phi"], p["G"], p["x"]
    m = g.level
    _need(_is_L(phi), "phi must be a formula of L")
    _need(g not in free_vars(phi), "G^m is a parameter of phi")
    _need(m >= max(sort_of(phi), 1), f"m must be >= max(sort(phi),1) = {max(sort_of(phi), 1)}")
    _need(x not in free_vars(phi), "x must not be a parameter of phi")
    return Exists(g, iff(phi, Exists(x, neg(Eq(0, app_down(Var(g), Var(x), m - 1), Zero())))))


def _x_ks(b):
    if isinstance(b, Exists) and isinstance(b.body, And) and isinstance(b.body.left, Implies) \
            and isinstance(b.body.left.right, Exists):
        yield {"phi": b.body.left.left, "G": b.var, "x": b.body.left.right.var}


def _b_wc(p):
    phi, f, g, x, y = p["phi"], p["F"], p["G"], p["x"], p["y"]
    n = f.level
    _need(f.kind == "lawless" and g.kind == "lawless" and g.level == n, "F and G must be lawless n-functionals")
    _need(sort_of(phi) <= n, f"sort(phi) must be <= {n}")
    _need(_lawless_restriction(phi, f, n), "phi has a non-lawlike parameter of type n other than F")
    _need(g not in free_vars(phi) and y not in free_vars(phi), "G and y must not be parameters of phi")
    _need(x != y, "x and y must differ")
    return Implies(Forall(f, Exists(x, phi)),
                   Forall(f, Exists(x, Exists(y, Forall(g, Implies(seg_eq(g, f, Var(y)),
                                                                   substitute(phi, f, Var(g))))))))


def _x_wc(b):
    if isinstance(b, Implies) and isinstance(b.left, Forall) and isinstance(b.left.body, Exists) \
            and isinstance(b.right, Forall) and isinstance(b.right.body, Exists) \
            and isinstance(b.right.body.body, Exists) and isinstance(b.right.body.body.body, Forall):
        yield {"phi": b.left.body.body, "F": b.left.var, "x": b.left.body.var,
               "y": b.right.body.body.var, "G": b.right.body.body.body.var}


def _b_bi(p):
    phi, psi, y, f, x, w = p["phi"], p["psi"], p["y"], p["F"], p["x"], p["w"]
    _need(f.level == 1 and f.kind == "functional", "F must be a 1-functional")
    _need(len({y, x, w}) == 3, "y, x, w must be distinct")
    for v in (f, x, w):
        _need(v not in free_vars(phi) and v not in free_vars(psi), f"{v} must not be a parameter of phi or psi")

    def at(form, t):
        return substitute(form, y, t)

    bar = Forall(f, Exists(x, Exists(w, And(Pred("initseg", (Var(w), Var(f), Var(x))), at(phi, Var(w))))))
    mono = Forall(x, Forall(y, Implies(phi, Forall(w, Implies(Pred("concat", (Var(y), Var(x), Var(w))),
                                                              at(phi, Var(w)))))))
    ind = Forall(y, Implies(Forall(x, Forall(w, Implies(Pred("concat", (Var(y), Var(x), Var(w))),
                                                         at(psi, Var(w))))), psi))
    base = Forall(y, Implies(phi, psi))
    return Implies(And(And(And(bar, mono), ind), base), at(psi, Zero()))


def _x_bi(b):
    try:
        base = b.left.right
        bar = b.left.left.left.left
        yield {"phi": base.body.left, "psi": base.body.right, "y": base.var, "F": bar.var,
               "x": bar.body.var, "w": bar.body.body.var}
    except AttributeError:
        return


def _b_mp(p):
    phi, x = p["phi"], p["x"]
    _need(_is_L(phi), "phi must be a formula of L")
    return Implies(And(Forall(x, Or(phi, neg(phi))), neg(neg(Exists(x, phi)))), Exists(x, phi))


def _x_mp(b):
    if isinstance(b, Implies) and isinstance(b.right, Exists):
        yield {"phi": b.right.body, "x": b.right.var}


def _b_ct(p):
    phi, x, y, e = p["phi"], p["x"], p["y"], p["e"]
    _need(len({x, y, e}) == 3, "x, y, e must be distinct")
    _need(e not in free_vars(phi), "e must not be a parameter of phi")
    return Implies(Forall(x, Exists(y, phi)),
                   Exists(e, Forall(x, Exists(y, And(Pred("kleene", (Var(e), Var(x), Var(y))), phi)))))


def _x_ct(b):
    if isinstance(b, Implies) and isinstance(b.left, Forall) and isinstance(b.left.body, Exists) \
            and isinstance(b.right, Exists):
        yield {"phi": b.left.body.body, "x": b.left.var, "y": b.left.body.var, "e": b.right.var}


def _b_compr(p):
    x, z, phi = p["X"], p["z"], p["phi"]
    n = z.level
    _need(x.kind == "set" and x.level == n + 1, "X must be a set variable of level n+1")
    _need(sort_of(phi) <= n + 1, f"srt(phi) must be <= {n + 1}")
    _need(x not in free_vars(phi), "x^{n+1} is a parameter of phi")
    return Exists(x, Forall(z, iff(Mem(n, Var(z), Var(x)), phi)))


def _x_compr(b):
    if isinstance(b, Exists) and isinstance(b.body, Forall) and isinstance(b.body.body, And) \
            and isinstance(b.body.body.left, Implies):
        yield {"X": b.var, "z": b.body.var, "phi": b.body.body.left.right}


def _b_ext(p):
    x, y, z = p["X"], p["Y"], p["z"]
    n = z.level
    _need(x.kind == y.kind == "set" and x.level == y.level == n + 1, "X, Y must be set variables of level n+1")
    _need(x != y, "X and Y must differ")
    return Implies(Forall(z, iff(Mem(n, Var(z), Var(x)), Mem(n, Var(z), Var(y)))), Eq(n + 1, Var(x), Var(y)))


def _x_ext(b):
    if isinstance(b, Implies) and isinstance(b.left, Forall) and isinstance(b.right, Eq) \
            and isinstance(b.right.left, Var) and isinstance(b.right.right, Var):
        yield {"X": b.right.left.var, "Y": b.right.right.var, "z": b.left.var}


FAMILIES: dict[str, tuple[Callable, Callable]] = {
    "L1": (_b_succ, _x_succ), "L2": (_b_plus, _x_plus), "L3": (_b_times, _x_times),
    "Induction": (_b_induction, _x_induction), "L5": (_b_l5, _x_l5), "L6": (_b_l6, _x_l6),
    "L7": (_b_l7, _x_l7), "Equality": (_b_equality, _x_equality),
    "CS1": (_b_cs1, _x_cs1), "CS2": (_b_cs2, _x_cs2), "CS3": (_b_cs3, _x_cs3),
    "LL1": (_b_ll1, _x_ll1), "LL2": (_b_ll2, _x_ll2), "LL3": (_b_ll3, _x_ll3),
    "C1": (_b_c1, _x_c1), "C2": (_b_c2, _x_c2), "KS": (_b_ks, _x_ks), "WC": (_b_wc, _x_wc),
    "BI": (_b_bi, _x_bi), "MP": (_b_mp, _x_mp), "CT": (_b_ct, _x_ct),
    "TI1": (_b_succ, _x_succ), "TI2": (_b_plus, _x_plus), "TI3": (_b_times, _x_times),
    "TI4": (_b_induction, _x_induction), "Compr": (_b_compr, _x_compr), "Ext": (_b_ext, _x_ext),
}

_L_FAMILIES = ("L1", "L2", "L3", "Induction", "L5", "L6", "L7", "Equality")
_LP_FAMILIES = _L_FAMILIES + ("CS1", "CS2", "CS3")
_SLP_FAMILIES = _LP_FAMILIES + ("LL1", "LL2", "LL3", "C1", "C2", "BI")
_TI_FAMILIES = ("TI1", "TI2", "TI3", "TI4", "Compr", "Ext", "Equality")

THEORY_FAMILIES = {
    "L": _L_FAMILIES, "LP": _LP_FAMILIES, "SLP": _SLP_FAMILIES,
    "TI": _TI_FAMILIES, "TIstar": tuple(f for f in _TI_FAMILIES if f != "Ext"),
}
# recognized as schemas but admitted by no theory: derivable (KS, WC),
# refuted in the model (MP) or inconsistent with choice (CT)
EXTRA_FAMILIES = ("KS", "WC", "MP", "CT")


def instantiate_schema(family, parts: dict) -> Formula:
    """Closed instance of a schema family; raises SideConditionError."""
    family = family.family if isinstance(family, AxiomId) else family
    if family not in FAMILIES:
        raise SideConditionError(f"unknown axiom family {family!r}")
    body = FAMILIES[family][0](dict(parts))
    check_sorts(body)
    return closure(body)


def _strip(phi: Formula) -> tuple[Formula, list]:
    bound = []
    while isinstance(phi, Forall):
        bound.append(phi.var)
        phi = phi.body
    return phi, bound


def match_family(family: str, phi: Formula) -> AxiomId | None:
    """Match a closed formula against one family, whatever the theory."""
    body, bound = _strip(phi)
    if len(set(bound)) != len(bound) or not free_vars(body) <= set(bound):
        return None
    build, extract = FAMILIES[family]
    candidates = []
    # the prefix may hide binders the body itself starts with
    for k in range(len(bound) + 1):
        inner = phi
        for _ in range(k):
            inner = inner.body
        if free_vars(inner) <= set(bound[:k]):
            candidates.append(inner)
    for cand in candidates:
        for parts in extract(cand):
            try:
                rebuilt = build(parts)
            except (SideConditionError, KeyError, TypeError, BethForgeError):
                continue
            if alpha_eq(rebuilt, cand):
                return AxiomId(family, tuple(sorted(parts.items(), key=lambda kv: kv[0])))
    return None


def is_axiom(th: Theory, phi: Formula) -> AxiomId | None:
    check_language(phi, th.language, th.s)
    if free_vars(phi):
        return None
    for fam in THEORY_FAMILIES[th.id]:
        hit = match_family(fam, phi)
        if hit is not None:
            return hit
    return None


def recognize(phi: Formula) -> AxiomId | None:
    """Any family, including those no theory admits."""
    for fam in FAMILIES:
        hit = match_family(fam, phi)
        if hit is not None:
            return hit
    return None


# ---------------------------------------------------------------- proofs

@dataclass(frozen=True)
class ProofTree:
    rule: str
    conclusion: Formula
    assumptions: tuple = ()
    premises: tuple = ()
    data: tuple = ()
    id: str | None = field(default=None, compare=False)

    def get(self, key, default=None):
        return dict(self.data).get(key, default)

    def size(self) -> int:
        return 1 + sum(p.size() for p in self.premises)


def node(rule, conclusion, assumptions=(), premises=(), id=None, **data) -> ProofTree:
    return ProofTree(rule, conclusion, tuple(assumptions), tuple(premises),
                     tuple(sorted(data.items())), id)


@dataclass(frozen=True)
class Checked:
    theory: Theory | None
    conclusion: Formula
    assumptions: tuple
    classical: bool

    @property
    def ok(self) -> bool:
        return True


RULES = ("hyp", "axiom", "eq_refl", "eq_subst", "weaken", "and_i", "and_e1", "and_e2",
         "or_i1", "or_i2", "or_e", "imp_i", "imp_e", "bot_e", "all_i", "all_e", "ex_i", "ex_e", "dne")


def _canon(phi):
    return rename_bound(phi)


def _subset(sub, sup) -> bool:
    big = {_canon(f) for f in sup}
    return all(_canon(f) in big for f in sub)


def _same(a, b) -> bool:
    return alpha_eq(a, b)


def check_proof(p: ProofTree, theory: Theory | None = None, classical: bool | None = None) -> Checked:
    """Check every node; raise RuleError, EigenvariableError or AxiomError."""
    if classical is None:
        classical = bool(theory and theory.classical)
    _check(p, theory, classical)
    return Checked(theory, p.conclusion, p.assumptions, classical)


def _prem(p: ProofTree, k: int):
    if len(p.premises) != k:
        raise RuleError(p, f"{p.rule} needs {k} premise(s), got {len(p.premises)}")
    return p.premises


def _check(p: ProofTree, theory, classical):
    for q in p.premises:
        _check(q, theory, classical)
    try:
        check_sorts(p.conclusion)
        for a in p.assumptions:
            check_sorts(a)
    except BethForgeError as exc:
        raise RuleError(p, f"ill-sorted formula: {exc}") from None
    r, c, gamma = p.rule, p.conclusion, p.assumptions

    def need(cond, why):
        if not cond:
            raise RuleError(p, f"{r}: {why}")

    def within(q, extra=()):
        need(_subset(q.assumptions, tuple(gamma) + tuple(extra)), "premise uses an undischarged assumption")

    if r not in RULES:
        raise RuleError(p, f"unknown rule {r!r}")
    if r == "hyp":
        _prem(p, 0)
        need(_subset([c], gamma), "conclusion is not among the assumptions")
    elif r == "axiom":
        _prem(p, 0)
        if theory is None:
            raise AxiomError(p, "axiom leaf without a theory")
        try:
            hit = is_axiom(theory, c)
        except LanguageError as exc:
            raise AxiomError(p, str(exc)) from None
        if hit is None:
            raise AxiomError(p, f"not an axiom of {theory}: {c}")
        fam = p.get("family")
        if fam and fam != hit.family and match_family(fam, c) is None:
            raise AxiomError(p, f"cited family {fam} does not match")
    elif r == "eq_refl":
        _prem(p, 0)
        need(isinstance(c, Eq) and c.left == c.right, "conclusion is not t = t")
    elif r == "eq_subst":
        e, body = _prem(p, 2)
        x, tmpl = p.get("var"), p.get("template")
        need(isinstance(e.conclusion, Eq), "first premise is not an equation")
        need(x is not None and tmpl is not None, "needs var and template data")
        within(e)
        within(body)
        t, u = e.conclusion.left, e.conclusion.right
        need(expr_level(t) == x.level, "equation level does not match the variable")
        need(_same(body.conclusion, substitute(tmpl, x, t)), "second premise is not template[t/x]")
        need(_same(c, substitute(tmpl, x, u)), "conclusion is not template[u/x]")
    elif r == "weaken":
        (q,) = _prem(p, 1)
        within(q)
        need(_same(q.conclusion, c), "weakening changed the conclusion")
    elif r == "and_i":
        a, b = _prem(p, 2)
        within(a)
        within(b)
        need(isinstance(c, And) and _same(c.left, a.conclusion) and _same(c.right, b.conclusion),
             "conclusion is not the conjunction of the premises")
    elif r in ("and_e1", "and_e2"):
        (q,) = _prem(p, 1)
        within(q)
        need(isinstance(q.conclusion, And), "premise is not a conjunction")
        part = q.conclusion.left if r == "and_e1" else q.conclusion.right
        need(_same(part, c), "conclusion is not the selected conjunct")
    elif r in ("or_i1", "or_i2"):
        (q,) = _prem(p, 1)
        within(q)
        need(isinstance(c, Or), "conclusion is not a disjunction")
        part = c.left if r == "or_i1" else c.right
        need(_same(part, q.conclusion), "premise is not the selected disjunct")
    elif r == "or_e":
        d, left, right = _prem(p, 3)
        within(d)
        need(isinstance(d.conclusion, Or), "first premise is not a disjunction")
        within(left, [d.conclusion.left])
        within(right, [d.conclusion.right])
        need(_same(left.conclusion, c) and _same(right.conclusion, c), "case conclusions differ")
    elif r == "imp_i":
        (q,) = _prem(p, 1)
        need(isinstance(c, Implies), "conclusion is not an implication")
        within(q, [c.left])
        need(_same(q.conclusion, c.right), "premise does not prove the consequent")
    elif r == "imp_e":
        f, a = _prem(p, 2)
        within(f)
        within(a)
        need(isinstance(f.conclusion, Implies), "first premise is not an implication")
        need(_same(f.conclusion.left, a.conclusion), "minor premise does not match the antecedent")
        need(_same(f.conclusion.right, c), "conclusion is not the consequent")
    elif r == "bot_e":
        (q,) = _prem(p, 1)
        within(q)
        need(isinstance(q.conclusion, Falsum), "premise is not falsum")
    elif r == "dne":
        (q,) = _prem(p, 1)
        if not classical:
            raise RuleError(p, "double-negation elimination is not an intuitionistic rule")
        within(q)
        need(_same(q.conclusion, neg(neg(c))), "premise is not the double negation of the conclusion")
    elif r == "all_i":
        (q,) = _prem(p, 1)
        within(q)
        need(isinstance(c, Forall), "conclusion is not universal")
        y = p.get("eigen", c.var)
        need(y.level == c.var.level and y.kind == c.var.kind, "eigenvariable sort mismatch")
        if any(y in free_vars(a) for a in q.assumptions):
            raise EigenvariableError(p, f"eigenvariable {y} is free in an open assumption")
        if y != c.var and y in free_vars(c):
            raise EigenvariableError(p, f"eigenvariable {y} is free in the conclusion")
        need(_same(q.conclusion, substitute(c.body, c.var, Var(y))), "premise is not the instance at the eigenvariable")
    elif r == "all_e":
        (q,) = _prem(p, 1)
        within(q)
        need(isinstance(q.conclusion, Forall), "premise is not universal")
        t = p.get("term")
        need(t is not None, "needs a term")
        f = q.conclusion
        try:
            inst = substitute(f.body, f.var, t)
        except BethForgeError as exc:
            raise RuleError(p, str(exc)) from None
        need(_same(inst, c), "conclusion is not the instance")
    elif r == "ex_i":
        (q,) = _prem(p, 1)
        within(q)
        need(isinstance(c, Exists), "conclusion is not existential")
        t = p.get("term")
        need(t is not None, "needs a term")
        try:
            inst = substitute(c.body, c.var, t)
        except BethForgeError as exc:
            raise RuleError(p, str(exc)) from None
        need(_same(inst, q.conclusion), "premise is not the instance")
    elif r == "ex_e":
        e, body = _prem(p, 2)
        within(e)
        need(isinstance(e.conclusion, Exists), "first premise is not existential")
        f = e.conclusion
        y = p.get("eigen", f.var)
        need(y.level == f.var.level and y.kind == f.var.kind, "eigenvariable sort mismatch")
        inst = substitute(f.body, f.var, Var(y))
        within(body, [inst])
        others = [a for a in body.assumptions if not _same(a, inst)]
        if any(y in free_vars(a) for a in others):
            raise EigenvariableError(p, f"eigenvariable {y} is free in an open assumption")
        if y in free_vars(c) or (y != f.var and y in free_vars(f)):
            raise EigenvariableError(p, f"eigenvariable {y} escapes")
        need(_same(body.conclusion, c), "second premise does not prove the conclusion")


# ---------------------------------------------------------------- proof files
# <id>: <rule> [<premise ids>] {key=value; ...} A; B |- C

_LINE = re.compile(r"^\s*(?P<id>[\w.-]+)\s*:\s*(?P<rule>\w+)\s*\[(?P<prem>[^\]]*)\]\s*"
                   r"(?:\{(?P<data>[^}]*)\})?\s*(?P<seq>.*)$")


def _parse_var(text: str) -> SortedVar:
    p = _Parser(text.strip())
    e = p.tatom()
    if not isinstance(e, Var):
        raise RuleError(None, f"not a variable: {text}")
    return e.var


def parse_proof(text: str, language: str = "SLP", s: int = 2) -> ProofTree:
    lines = {}
    order = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _LINE.match(line)
        if not m or "|-" not in m.group("seq"):
            raise RuleError(None, f"cannot read proof line: {raw!r}")
        lhs, rhs = m.group("seq").split("|-", 1)
        gamma = tuple(parse(a, language, s) for a in lhs.split(";") if a.strip())
        concl = parse(rhs, language, s)
        data = {}
        for item in (m.group("data") or "").split(";"):
            if not item.strip():
                continue
            key, _, val = item.partition("=")
            key, val = key.strip(), val.strip()
            if key in ("eigen", "var"):
                data[key] = _parse_var(val)
            elif key == "term":
                data[key] = parse(val, language, s, kind="expr")
            elif key == "template":
                data[key] = parse(val, language, s)
            else:
                data[key] = val
        prem = [x.strip() for x in m.group("prem").split(",") if x.strip()]
        ident = m.group("id")
        lines[ident] = (m.group("rule"), concl, gamma, prem, data)
        order.append(ident)
    if not order:
        raise RuleError(None, "empty proof")
    built: dict[str, ProofTree] = {}

    def build(ident, stack=()):
        if ident in built:
            return built[ident]
        if ident not in lines or ident in stack:
            raise RuleError(None, f"bad premise reference {ident!r}")
        rule, concl, gamma, prem, data = lines[ident]
        kids = [build(k, stack + (ident,)) for k in prem]
        built[ident] = node(rule, concl, gamma, kids, id=ident, **data)
        return built[ident]

    return build(order[-1])


def proof_to_text(p: ProofTree) -> str:
    out: list[str] = []

    def emit(q: ProofTree) -> str:
        kids = [emit(k) for k in q.premises]
        ident = str(len(out) + 1)
        data = "; ".join(f"{k}={v}" for k, v in q.data)
        data = f" {{{data}}}" if data else ""
        gamma = "; ".join(str(a) for a in q.assumptions)
        out.append(f"{ident}: {q.rule} [{', '.join(kids)}]{data} {gamma} |- {q.conclusion}".replace("  ", " "))
        return ident

    emit(p)
    return "\n".join(out) + "\n"
