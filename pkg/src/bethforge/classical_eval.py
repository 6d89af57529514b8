"""Classical finite semantics for the typed set theory and the functional language.

TypedUniverse is the full type structure over {0..N-1}; FunctionalUniverse
holds total maps over {0..top}.  Arithmetic saturates at the universe's
cap, so S(cap) = cap and + and * are clipped.  This keeps evaluation total
on a finite carrier at the price of the successor axioms, which only hold
below the cap.

Also here: the typed pair and sequence codings, evaluations coded as sets,
and the evaluators arval and tr that recurse over Goedel numbers instead of
syntax trees.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Sequence

from .syntax_core import (
    _ALIAS_BLOCK, Ap, And, BethForgeError, DecodeError, Eq, Exists, Falsum, Forall,
    Implies, K, LanguageError, Mem, N, Or, Plus, SortedVar, Succ, Times, Var, Zero,
    cantor_pair, cantor_unpair, code_parts,
)


class CapacityError(BethForgeError):
    pass


class UnboundVariable(BethForgeError):
    pass


# numeric variables w<i> (this index block) are enumeration positions in a functional universe
POSITION_BLOCK = 5 * _ALIAS_BLOCK


def is_position(v: SortedVar) -> bool:
    return v.kind == "number" and POSITION_BLOCK <= v.index < POSITION_BLOCK + _ALIAS_BLOCK


def position_var(i: int) -> SortedVar:
    return SortedVar(POSITION_BLOCK + i, 0, "number")


def _canon(obj):
    """A total order key for hereditarily finite objects."""
    if isinstance(obj, int):
        return (0, obj)
    if isinstance(obj, tuple):
        return (2, tuple(_canon(x) for x in obj))
    return (1, len(obj), tuple(sorted(_canon(x) for x in obj)))


def _sorted(xs):
    return sorted(xs, key=_canon)


def _sat(v: int, top: int) -> int:
    return v if v <= top else top


# ---------------------------------------------------------------- set universe

@dataclass(frozen=True)
class TypedUniverse:
    s: int
    N: int
    cap: int | None = None  # arithmetic ceiling; N-1 unless given
    max_size: int = 1 << 16
    _levels: list = field(default_factory=list, init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.s < 0 or self.N < 1:
            raise ValueError("need s >= 0 and N >= 1")
        if self.cap is not None and self.cap < self.N - 1:
            raise ValueError("cap must be at least N-1")
        levels = [tuple(range(self.N))]
        for _ in range(self.s):
            size = 2 ** len(levels[-1])
            if size > self.max_size:
                raise CapacityError(f"level {len(levels)} would have {size} sets")
            levels.append(tuple(_powerset(levels[-1])))
        self._levels.extend(levels)

    @classmethod
    def for_translation(cls, s: int, N: int) -> "TypedUniverse":
        """The universe whose arithmetic matches FunctionalUniverse.image_of."""
        return cls(s, N, cap=N + 1)

    @property
    def top(self) -> int:
        return self.N - 1 if self.cap is None else self.cap

    def carrier(self, k: int) -> tuple:
        if not 0 <= k <= self.s:
            raise LanguageError(f"level {k} outside 0..{self.s}")
        return self._levels[k]


def _powerset(xs: Sequence) -> Iterator[frozenset]:
    for r in range(len(xs) + 1):
        for c in itertools.combinations(xs, r):
            yield frozenset(c)


def _lookup(e: Mapping, v: SortedVar):
    if v in e:
        return e[v]
    raise UnboundVariable(f"no value for {v}")


def _term_ti(U: TypedUniverse, t, e):
    if isinstance(t, Zero):
        return 0
    if isinstance(t, Var):
        return _lookup(e, t.var)
    if isinstance(t, Succ):
        return _sat(_term_ti(U, t.arg, e) + 1, U.top)
    if isinstance(t, Plus):
        return _sat(_term_ti(U, t.left, e) + _term_ti(U, t.right, e), U.top)
    if isinstance(t, Times):
        return _sat(_term_ti(U, t.left, e) * _term_ti(U, t.right, e), U.top)
    raise LanguageError(f"{type(t).__name__} is not a term of the set language")


def eval_ti(U: TypedUniverse, phi, e: Mapping | None = None) -> bool:
    """Tarski truth in the finite full type structure."""
    return _eval_ti(U, phi, dict(e or {}))


def _eval_ti(U, phi, e) -> bool:
    if isinstance(phi, Falsum):
        return False
    if isinstance(phi, Eq):
        return _term_ti(U, phi.left, e) == _term_ti(U, phi.right, e)
    if isinstance(phi, Mem):
        return _term_ti(U, phi.elem, e) in _term_ti(U, phi.set, e)
    if isinstance(phi, And):
        return _eval_ti(U, phi.left, e) and _eval_ti(U, phi.right, e)
    if isinstance(phi, Or):
        return _eval_ti(U, phi.left, e) or _eval_ti(U, phi.right, e)
    if isinstance(phi, Implies):
        return (not _eval_ti(U, phi.left, e)) or _eval_ti(U, phi.right, e)
    if isinstance(phi, (Forall, Exists)):
        test = all if isinstance(phi, Forall) else any
        old = e.get(phi.var, _NONE)
        try:
            return test(_eval_ti(U, phi.body, _set(e, phi.var, c)) for c in U.carrier(phi.var.level))
        finally:
            _restore(e, phi.var, old)
    raise LanguageError(f"{type(phi).__name__} is not a formula of the set language")


_NONE = object()


def _set(e, v, c):
    e[v] = c
    return e


def _restore(e, v, old):
    if old is _NONE:
        e.pop(v, None)
    else:
        e[v] = old


# ---------------------------------------------------------------- functional universe

@dataclass(frozen=True)
class FunctionalUniverse:
    """Total maps over the numeric carrier {0..top}.

    Level-k objects are tuples of length top+1.  data is the range of
    ordinary numeric quantifiers and positions the range of w-variables;
    both default to the whole carrier.  levels optionally pins the carrier
    of each functional level (otherwise all maps, if that is small enough).
    """

    s: int
    top: int
    data: tuple | None = None
    positions: tuple | None = None
    levels: tuple | None = None
    max_size: int = 100_000

    def numbers(self, v: SortedVar | None = None) -> tuple:
        if v is not None and is_position(v):
            return self.positions if self.positions is not None else tuple(range(self.top + 1))
        return self.data if self.data is not None else tuple(range(self.top + 1))

    def carrier(self, k: int) -> tuple:
        if k == 0:
            return self.numbers()
        if not 1 <= k <= self.s:
            raise LanguageError(f"level {k} outside 0..{self.s}")
        if self.levels is not None:
            return self.levels[k - 1]
        below = tuple(range(self.top + 1)) if k == 1 else self.carrier(k - 1)
        size = len(below) ** (self.top + 1)
        if size > self.max_size:
            raise CapacityError(f"W_{k} has {size} maps; pin the carrier instead")
        return tuple(itertools.product(below, repeat=self.top + 1))

    def konst(self, k: int):
        """The K tower: K^1 is constantly 0, K^{k+1} constantly K^k."""
        v = 0
        for _ in range(k):
            v = (v,) * (self.top + 1)
        return v

    def shift(self, k: int, v):
        """N^k: S at level 0, pointwise below that."""
        if k == 0:
            return _sat(v + 1, self.top)
        return tuple(self.shift(k - 1, x) for x in v)

    @classmethod
    def image_of(cls, U: TypedUniverse, top: int | None = None) -> "FunctionalUniverse":
        """Functional universe whose carriers are the codes of U's sets."""
        top = U.N + 1 if top is None else top
        if top < U.N + 1:
            raise CapacityError("the numeric carrier must exceed N")
        blank = cls(U.s, top)
        levels = tuple(tuple(set_to_functional(U, blank, x, k) for x in U.carrier(k))
                       for k in range(1, U.s + 1))
        return cls(U.s, top, data=tuple(range(U.N)), positions=tuple(range(top + 1)), levels=levels)


def set_to_functional(U: TypedUniverse, W: FunctionalUniverse, x, k: int):
    """Code a level-k set as a level-k functional.

    Members get consecutive positions in canonical order and are stored
    shifted (S at level 0, N^{k-1} above), so 0 and the K tower are free for
    padding: z in x iff some position holds the shifted code of z.
    """
    if k == 0:
        return x
    members = _sorted(x)
    if len(members) > W.top + 1:
        raise CapacityError(f"{len(members)} members do not fit in {W.top + 1} positions")
    vals = [W.shift(k - 1, set_to_functional(U, W, m, k - 1)) for m in members]
    pad = W.konst(k - 1)
    return tuple(vals + [pad] * (W.top + 1 - len(vals)))


def _term_slp(W: FunctionalUniverse, t, e):
    if isinstance(t, Zero):
        return 0
    if isinstance(t, K):
        return W.konst(t.level)
    if isinstance(t, Var):
        return _lookup(e, t.var)
    if isinstance(t, Succ):
        return _sat(_term_slp(W, t.arg, e) + 1, W.top)
    if isinstance(t, Plus):
        return _sat(_term_slp(W, t.left, e) + _term_slp(W, t.right, e), W.top)
    if isinstance(t, Times):
        return _sat(_term_slp(W, t.left, e) * _term_slp(W, t.right, e), W.top)
    if isinstance(t, N):
        return W.shift(t.level, _term_slp(W, t.arg, e))
    if isinstance(t, Ap):
        return _term_slp(W, t.fun, e)[_term_slp(W, t.arg, e)]
    raise LanguageError(f"{type(t).__name__} is not a term of the functional language")


def eval_slp(W: FunctionalUniverse, phi, e: Mapping | None = None) -> bool:
    """Classical truth of a functional-language formula; every kind ranges over W_k."""
    return _eval_slp(W, phi, dict(e or {}))


def _eval_slp(W, phi, e) -> bool:
    if isinstance(phi, Falsum):
        return False
    if isinstance(phi, Eq):
        return _term_slp(W, phi.left, e) == _term_slp(W, phi.right, e)
    if isinstance(phi, And):
        return _eval_slp(W, phi.left, e) and _eval_slp(W, phi.right, e)
    if isinstance(phi, Or):
        return _eval_slp(W, phi.left, e) or _eval_slp(W, phi.right, e)
    if isinstance(phi, Implies):
        return (not _eval_slp(W, phi.left, e)) or _eval_slp(W, phi.right, e)
    if isinstance(phi, (Forall, Exists)):
        test = all if isinstance(phi, Forall) else any
        v = phi.var
        dom = W.numbers(v) if v.level == 0 else W.carrier(v.level)
        old = e.get(v, _NONE)
        try:
            return test(_eval_slp(W, phi.body, _set(e, v, c)) for c in dom)
        finally:
            _restore(e, v, old)
    raise LanguageError(f"{type(phi).__name__} has no classical reading here")


# ---------------------------------------------------------------- pairs and sequences

def lift(x, times: int):
    """{x}^times: wrap in singletons."""
    for _ in range(times):
        x = frozenset([x])
    return x


def unlift(x, times: int):
    for _ in range(times):
        if not isinstance(x, frozenset) or len(x) != 1:
            raise DecodeError(f"{x!r} is not a singleton")
        (x,) = x
    return x


def _check_cap(code: int, cap: int | None) -> int:
    if cap is not None and code > cap:
        raise CapacityError(f"code {code} exceeds the numeric carrier 0..{cap}")
    return code


def pair_encode(k: int, x, y, cap: int | None = None):
    """[x, y] at level k; level 0 is Cantor pairing."""
    if k == 0:
        return _check_cap(cantor_pair(x, y), cap)
    left = lift(0, k - 1)
    right = lift(1, k - 1)
    return frozenset([pair_encode(k - 1, left, z, cap) for z in x]
                     + [pair_encode(k - 1, right, z, cap) for z in y])


def pair_decode(k: int, p) -> tuple:
    if k == 0:
        return cantor_unpair(p)
    left, right = lift(0, k - 1), lift(1, k - 1)
    xs, ys = set(), set()
    for m in p:
        a, z = pair_decode(k - 1, m)
        if a == left:
            xs.add(z)
        elif a == right:
            ys.add(z)
        else:
            raise DecodeError("member is not tagged as a pair component")
    return frozenset(xs), frozenset(ys)


def seq_encode(k: int, xs: Sequence, cap: int | None = None):
    """<x_1, ..., x_m> at level k; level 0 codes 1 + [head, rest] with 0 for the empty sequence."""
    if k == 0:
        out = 0
        for c in reversed(list(xs)):
            out = 1 + cantor_pair(c, out)
        return _check_cap(out, cap)
    members = [pair_encode(k - 1, lift(0, k - 1), lift(len(xs), k - 1), cap)]
    for i, x in enumerate(xs, start=1):
        members.extend(pair_encode(k - 1, lift(i, k - 1), z, cap) for z in x)
    return frozenset(members)


def seq_decode(k: int, s) -> list:
    if k == 0:
        out = []
        while s:
            c, s = cantor_unpair(s - 1)
            out.append(c)
        return out
    length = None
    parts: dict[int, set] = {}
    for m in s:
        a, z = pair_decode(k - 1, m)
        i = unlift(a, k - 1)
        if i == 0:
            if length is not None:
                raise DecodeError("two length markers")
            length = unlift(z, k - 1)
        else:
            parts.setdefault(i, set()).add(z)
    if length is None or any(i > length for i in parts):
        raise DecodeError("malformed sequence")
    return [frozenset(parts.get(i, ())) for i in range(1, length + 1)]


def seq_length(k: int, s) -> int:
    return len(seq_decode(k, s))


def seq_encode_mixed(items: Sequence[tuple[int, object]], cap: int | None = None):
    """Sequence of objects of mixed levels, lifting each to the highest level."""
    m = max(lv for lv, _ in items)
    return m, seq_encode(m, [lift(x, m - lv) for lv, x in items], cap)


# ---------------------------------------------------------------- coded evaluations

def encode_evaluation(k: int, values: Mapping[int, object]):
    """The set coding an evaluation of level-k variables: index i -> values[i].

    For k >= 1 this is a level-k object holding <i, z> for each z in values[i].
    For k = 0 it is the level-1 graph {<i, n>} (the numeric case sits one level up).
    """
    if k == 0:
        return frozenset(seq_encode(0, [i, n]) for i, n in values.items())
    return frozenset(seq_encode_mixed([(0, i), (k - 1, z)])[1]
                     for i, y in values.items() for z in y)


def _entries(k: int, f) -> Iterator[tuple]:
    # members of a coded evaluation are two-element sequences <i, z>
    for m in f:
        if k <= 1:
            parts = seq_decode(0, m)
        else:
            parts = seq_decode(k - 1, m)
            parts = [unlift(parts[0], k - 1), parts[1]] if len(parts) == 2 else parts
        if len(parts) == 2:
            yield parts[0], parts[1]


def val_k(k: int, f, i: int):
    """Value of variable i under a coded evaluation (Val_k)."""
    hits = [z for j, z in _entries(k, f) if j == i]
    if k == 0:
        return hits[0] if len(hits) == 1 else 0
    return frozenset(hits)


def subst_k(k: int, f, i: int, y):
    """Change the value of variable i to y (Subst_k)."""
    keep = frozenset(m for m in f if _index_of(k, m) != i)
    return keep | encode_evaluation(k, {i: y})


def _index_of(k: int, m) -> int:
    if k <= 1:
        return seq_decode(0, m)[0]
    return unlift(seq_decode(k - 1, m)[0], k - 1)


def cross_check(assignment: Mapping[SortedVar, object], probe: Mapping[int, object] | None = None) -> list[str]:
    """Re-encode an assignment level by level and check Val_k and Subst_k.

    Returns a list of divergences (empty when the coded and native forms
    agree).  probe maps a level to a replacement value used for the Subst_k
    check on the lowest-indexed variable of that level.
    """
    out = []
    by_level: dict[int, dict[int, object]] = {}
    for v, x in assignment.items():
        by_level.setdefault(v.level, {})[v.index] = x
    for k, values in sorted(by_level.items()):
        f = encode_evaluation(k, values)
        for i, x in values.items():
            if val_k(k, f, i) != x:
                out.append(f"level {k}: Val_k disagrees at variable {i}")
        if probe and k in probe and values:
            i = min(values)
            g = subst_k(k, f, i, probe[k])
            if val_k(k, g, i) != probe[k]:
                out.append(f"level {k}: Subst_k did not install the new value")
            for j, x in values.items():
                if j != i and val_k(k, g, j) != x:
                    out.append(f"level {k}: Subst_k disturbed variable {j}")
    return out


# ---------------------------------------------------------------- evaluators over codes

def arval(n: int, f: Mapping, cap: int | None = None) -> int:
    """Value of the arithmetic term with code n under the numeric assignment f."""
    name, parts = code_parts(n)
    if name == "Zero":
        return 0
    if name == "Var":
        (v,) = parts
        if v.level != 0:
            raise DecodeError(f"{v} is not a numeric variable")
        if v in f:
            return f[v]
        if v.index in f:
            return f[v.index]
        raise UnboundVariable(f"no value for {v}")
    if name == "Succ":
        r = arval(parts[0], f, cap) + 1
    elif name == "Plus":
        r = arval(parts[0], f, cap) + arval(parts[1], f, cap)
    elif name == "Times":
        r = arval(parts[0], f, cap) * arval(parts[1], f, cap)
    else:
        raise DecodeError(f"code {n} is a {name}, not an arithmetic term")
    return r if cap is None else _sat(r, cap)


def _set_term(n: int, e: Mapping):
    name, parts = code_parts(n)
    if name != "Var":
        raise DecodeError(f"code {n} is a {name}, not a set variable")
    return _lookup(e, parts[0])


def _value(U: TypedUniverse, level: int, n: int, e):
    return arval(n, e, U.top) if level == 0 else _set_term(n, e)


def tr(U: TypedUniverse, n: int, e: Mapping | None = None) -> bool:
    """Truth of the formula with code n, by recursion on codes."""
    return _tr(U, n, dict(e or {}))


def _tr(U: TypedUniverse, n: int, e) -> bool:
    name, parts = code_parts(n)
    if name == "Falsum":
        return False
    if name == "Eq":
        lv, a, b = parts
        return _value(U, lv, a, e) == _value(U, lv, b, e)
    if name == "Mem":
        lv, a, b = parts
        return _value(U, lv, a, e) in _set_term(b, e)
    if name == "And":
        return _tr(U, parts[0], e) and _tr(U, parts[1], e)
    if name == "Or":
        return _tr(U, parts[0], e) or _tr(U, parts[1], e)
    if name == "Implies":
        return (not _tr(U, parts[0], e)) or _tr(U, parts[1], e)
    if name in ("Forall", "Exists"):
        v, body = parts
        test = all if name == "Forall" else any
        old = e.get(v, _NONE)
        try:
            # Sub_k: the evaluation with variable v changed to y
            return test(_tr(U, body, _set(e, v, y)) for y in U.carrier(v.level))
        finally:
            _restore(e, v, old)
    raise DecodeError(f"code {n} is a {name}, not a formula of the set language")
