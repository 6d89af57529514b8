"""Depth-truncated fragments of the functional Beth model.

Nodes carry one sequence per level 0..s-1, all of the same length.
Component 0 branches over 0..B-1.  Higher components branch over a small
representative alphabet: the constant functional followed by every lawless
table generated from a family of bijections on the alphabet one level down.
That alphabet is closed under the permutation transport, so everything the
permutation lemmas talk about stays inside the truncation.

Functional tables are finite partial maps (node, n) -> value with n < D.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Iterable, Iterator, Mapping, Sequence

from .syntax_core import (
    Ap, And, BethForgeError, Eq, Exists, Falsum, Forall, Implies, K, N, Or, Plus,
    Pred, Proves, SortedVar, Succ, Times, Var, Zero, check_sorts, max_level,
)


class BlowupError(BethForgeError):
    pass


class PreconditionError(BethForgeError):
    pass


class IncompleteError(BethForgeError):
    pass


DEFAULT_CAP = 250_000


@dataclass(frozen=True)
class TruncationParams:
    s: int
    depth: int
    base: int = 2
    cap: int = DEFAULT_CAP

    def __post_init__(self):
        if self.s < 1:
            raise ValueError("s must be >= 1")
        if self.depth < 1 or self.base < 2:
            raise ValueError("need depth >= 1 and base >= 2")

    @property
    def D(self) -> int:
        return self.depth

    @property
    def B(self) -> int:
        return self.base


def guard(params: TruncationParams) -> None:
    """The default feasibility envelope for exhaustive enumeration."""
    if params.s > 2 or params.depth > 3 or params.base > 2:
        raise BlowupError(f"enumeration outside s<=2, D<=3, B<=2: {params}")


# ---------------------------------------------------------------- nodes

@dataclass(frozen=True, order=True)
class NodeB:
    components: tuple

    def __post_init__(self):
        lens = {len(c) for c in self.components}
        if len(lens) > 1:
            raise ValueError("node components must have equal length")

    @property
    def lh(self) -> int:
        return len(self.components[0]) if self.components else 0

    @property
    def width(self) -> int:
        return len(self.components)

    def prefix(self, k: int) -> "NodeB":
        """The first k components, a node of d_{k-1}."""
        return NodeB(self.components[:k])

    def cut(self, m: int) -> "NodeB":
        """Ancestor of length m."""
        return NodeB(tuple(c[:m] for c in self.components))

    def below(self, other: "NodeB") -> bool:
        """self is at or below other in the tree order."""
        return self.width == other.width and all(
            a[:len(b)] == b for a, b in zip(self.components, other.components))

    def ancestors(self) -> list["NodeB"]:
        return [self.cut(m) for m in range(self.lh + 1)]

    def child(self, entries: Sequence) -> "NodeB":
        return NodeB(tuple(c + (e,) for c, e in zip(self.components, entries)))

    def __str__(self):
        return "/".join(",".join(_show_value(e) for e in c) or "-" for c in self.components)


def root(width: int) -> NodeB:
    return NodeB(tuple(() for _ in range(width)))


def _show_value(v) -> str:
    if isinstance(v, FunctionalTable):
        return v.name or f"T{v.level}#{abs(hash(v)) % 10**6}"
    return str(v)


# ---------------------------------------------------------------- tables

class FunctionalTable:
    """A finite partial table of a level-k functional.

    entries maps (node of d_{k-1}, n) to a number (k = 1) or to a table of
    level k-1.  Equality and hashing are by level and entries only.
    """

    __slots__ = ("level", "entries", "name", "certificate", "_hash")

    def __init__(self, level: int, entries: Mapping, name: str | None = None,
                 certificate: "Permutation | None" = None):
        self.level = level
        self.entries = dict(entries)
        self.name = name
        self.certificate = certificate
        self._hash = None

    def __call__(self, x: NodeB, n: int):
        return self.entries.get((x, n))

    def __eq__(self, other):
        return (isinstance(other, FunctionalTable) and self.level == other.level
                and hash(self) == hash(other) and self.entries == other.entries)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.level, frozenset(self.entries.items())))
        return self._hash

    def __repr__(self):
        return f"FunctionalTable(level={self.level}, name={self.name!r}, entries={len(self.entries)})"

    def column(self, n: int) -> dict:
        return {x: v for (x, m), v in self.entries.items() if m == n}

    def renamed(self, name: str) -> "FunctionalTable":
        return FunctionalTable(self.level, self.entries, name, self.certificate)


@dataclass(frozen=True)
class Permutation:
    """A family of bijections xi^[n], n < D, on one truncated carrier."""

    level: int
    maps: tuple  # maps[n] is a frozenset of (value, image) pairs

    @cached_property
    def _dicts(self) -> tuple:
        return tuple(dict(m) for m in self.maps)

    def __call__(self, n: int, v):
        return self._dicts[n][v]

    def inverse(self) -> "Permutation":
        return Permutation(self.level, tuple(frozenset((b, a) for a, b in m) for m in self.maps))

    def is_bijection_on(self, carrier: Sequence) -> bool:
        cs = set(carrier)
        return all(set(d) == cs and set(d.values()) == cs and len(d) == len(cs)
                   for d in self._dicts)

    def is_identity(self) -> bool:
        return all(a == b for m in self.maps for a, b in m)

    @staticmethod
    def of(level: int, funcs: Sequence[Mapping]) -> "Permutation":
        return Permutation(level, tuple(frozenset(f.items()) for f in funcs))


# ---------------------------------------------------------------- the truncated universe

class Universe:
    """Carriers, node trees and constants for one TruncationParams."""

    def __init__(self, params: TruncationParams):
        self.params = params
        self.D = params.depth
        self.B = params.base
        self._alphabets: dict[int, tuple] = {0: tuple(range(self.B))}
        self._nodes: dict[int, tuple] = {}
        self._konst: dict[int, FunctionalTable] = {}
        self._children: dict[NodeB, list] = {}

    # -- alphabets and nodes
    def alphabet(self, j: int) -> tuple:
        """Entries allowed in component j of a node (and values of level j+1 tables)."""
        if j not in self._alphabets:
            fams = self.permutation_families(j)
            tabs = [self.konst(j)]
            for i, xi in enumerate(fams):
                tabs.append(self.nu(j, xi).renamed(f"L{j}_{i}"))
            self._alphabets[j] = tuple(tabs)
        return self._alphabets[j]

    def nodes(self, k: int) -> tuple:
        """All nodes of truncated d_k (k+1 components), shortest first."""
        if k not in self._nodes:
            alph = [self.alphabet(j) for j in range(k + 1)]
            size = sum(_prod(len(a) for a in alph) ** m for m in range(self.D + 1))
            if size > self.params.cap:
                raise BlowupError(f"d_{k} would have {size} nodes (cap {self.params.cap})")
            out = [root(k + 1)]
            layer = out[:]
            for _ in range(self.D):
                layer = [x.child(e) for x in layer for e in itertools.product(*alph)]
                out.extend(layer)
            self._nodes[k] = tuple(out)
        return self._nodes[k]

    def space(self) -> tuple:
        """The truncated domain M = d_{s-1}."""
        return self.nodes(self.params.s - 1)

    def children(self, x: NodeB) -> list[NodeB]:
        if x.lh >= self.D:
            return []
        kids = self._children.get(x)
        if kids is None:
            alph = [self.alphabet(j) for j in range(x.width)]
            kids = self._children[x] = [x.child(e) for e in itertools.product(*alph)]
        return kids

    def below(self, x: NodeB) -> Iterator[NodeB]:
        """x and every truncated node under it."""
        stack = [x]
        while stack:
            y = stack.pop()
            yield y
            stack.extend(self.children(y))

    def maximal_paths(self, k: int) -> Iterator[tuple]:
        """Root-to-depth-D chains of truncated d_k."""
        for leaf in self.nodes(k):
            if leaf.lh == self.D:
                yield tuple(leaf.ancestors())

    # -- constants
    def konst(self, k: int) -> FunctionalTable:
        """The constant functional: K^1(x,n)=0, K^{k+1}(x,n)=K^k."""
        if k not in self._konst:
            val = 0 if k == 1 else self.konst(k - 1)
            ent = {(x, n): val for x in self.nodes(k - 1) for n in range(self.D)}
            self._konst[k] = FunctionalTable(k, ent, f"K{k}")
        return self._konst[k]

    # -- permutations and lawless tables
    def permutation_families(self, k: int) -> list[Permutation]:
        """Every family of bijections on the level k-1 alphabet, identity first."""
        carrier = self.alphabet(k - 1)
        nperm = _factorial(len(carrier))
        if nperm ** self.D > self.params.cap:
            raise BlowupError(f"{nperm}^{self.D} permutation families at level {k}")
        perms = list(itertools.permutations(carrier))
        out = []
        for choice in itertools.product(perms, repeat=self.D):
            out.append(Permutation.of(k, [dict(zip(carrier, p)) for p in choice]))
        return out

    def nu(self, k: int, xi: Permutation) -> FunctionalTable:
        """The lawless table nu_k(xi): xi^[n] applied to the n-th entry of the last component."""
        ent = {}
        for x in self.nodes(k - 1):
            comp = x.components[k - 1]
            for n in range(min(x.lh, self.D)):
                ent[(x, n)] = xi(n, comp[n])
        return FunctionalTable(k, ent, certificate=xi)

    def path_reader(self, k: int) -> FunctionalTable:
        ident = Permutation.of(k, [{v: v for v in self.alphabet(k - 1)}] * self.D)
        return self.nu(k, ident).renamed(f"path{k}")

    def first_entry(self, k: int) -> FunctionalTable:
        """g(x,n) = first entry of the last component; neither lawlike nor lawless."""
        ent = {}
        for x in self.nodes(k - 1):
            if x.lh > 0:
                for n in range(self.D):
                    ent[(x, n)] = x.components[k - 1][0]
        return FunctionalTable(k, ent, f"first{k}")

    # -- table enumeration
    def count_tables(self, k: int) -> int:
        values = len(self.alphabet(k - 1))
        branch = _prod(len(self.alphabet(j)) for j in range(k))
        g = values
        for _ in range(self.D):
            g = values + g ** branch
        return g ** self.D

    def tables(self, k: int) -> list[FunctionalTable]:
        """Every monotone, complete-to-D table of level k."""
        total = self.count_tables(k)
        if total > self.params.cap:
            raise BlowupError(f"a_{k} has {_magnitude(total)} truncated tables (cap {self.params.cap})")
        values = self.alphabet(k - 1)
        cols = [list(self._columns(root(k), values)) for _ in range(self.D)]
        out = []
        for combo in itertools.product(*cols):
            ent = {}
            for n, col in enumerate(combo):
                for x, v in col:
                    ent[(x, n)] = v
            out.append(FunctionalTable(k, ent))
        return out

    def _columns(self, x: NodeB, values) -> Iterator[tuple]:
        # a column is fixed by where it first gets a value; below that it is constant
        for v in values:
            yield tuple((y, v) for y in self.below(x))
        if x.lh < self.D:
            kids = self.children(x)
            for parts in itertools.product(*(list(self._columns(c, values)) for c in kids)):
                yield tuple(p for part in parts for p in part)

    # -- table properties
    def is_monotone(self, f: FunctionalTable) -> bool:
        for (x, n), v in f.entries.items():
            for c in self.children(x):
                if f.entries.get((c, n), _MISSING) != v:
                    return False
        return True

    def is_complete(self, f: FunctionalTable) -> bool:
        """Every depth-D node of d_{k-1} has every column n < D defined."""
        return all((x, n) in f.entries for x in self.nodes(f.level - 1)
                   if x.lh == self.D for n in range(self.D))

    def in_carrier(self, f) -> bool:
        """Membership in the truncated a_k: well-typed, monotone and complete-to-D."""
        if not isinstance(f, FunctionalTable):
            return isinstance(f, int) and f >= 0
        dom = set(self.nodes(f.level - 1))
        for (x, n), v in f.entries.items():
            if x not in dom or not 0 <= n < self.D:
                return False
            if f.level == 1:
                if not (isinstance(v, int) and v >= 0):
                    return False
            elif not (isinstance(v, FunctionalTable) and v.level == f.level - 1):
                return False
        return self.is_monotone(f) and self.is_complete(f)

    def is_lawlike(self, f: FunctionalTable) -> bool:
        r = root(f.level)
        return all((r, n) in f.entries for n in range(self.D))

    def certificate(self, f: FunctionalTable) -> Permutation | None:
        """Rebuild xi with nu(xi) = f, if there is one."""
        k = f.level
        carrier = self.alphabet(k - 1)
        maps = [dict() for _ in range(self.D)]
        for x in self.nodes(k - 1):
            for n in range(self.D):
                v = f.entries.get((x, n), _MISSING)
                if n >= x.lh:
                    if v is not _MISSING:
                        return None
                    continue
                if v is _MISSING:
                    return None
                key = x.components[k - 1][n]
                if maps[n].setdefault(key, v) != v:
                    return None
        for m in maps:
            if set(m) != set(carrier) or set(m.values()) != set(carrier):
                return None
        return Permutation.of(k, maps)

    def classify(self, f: FunctionalTable) -> "Kind":
        if self.is_lawlike(f):
            return Kind.LAWLIKE
        if self.certificate(f) is not None:
            return Kind.LAWLESS
        return Kind.NEITHER


_MISSING = object()


class Kind(enum.Enum):
    LAWLIKE = "lawlike"
    LAWLESS = "lawless"
    NEITHER = "neither"


def _prod(xs: Iterable[int]) -> int:
    p = 1
    for x in xs:
        p *= x
    return p


def _magnitude(n: int) -> str:
    return str(n) if n < 10**12 else f"about 10^{len(str(n)) - 1}"


def _factorial(n: int) -> int:
    return _prod(range(1, n + 1))


_UNIVERSES: dict[TruncationParams, Universe] = {}


def universe(params: TruncationParams) -> Universe:
    if params not in _UNIVERSES:
        _UNIVERSES[params] = Universe(params)
    return _UNIVERSES[params]


# ---------------------------------------------------------------- public operations

@dataclass(frozen=True)
class Domain:
    k: int
    carrier: tuple
    nodes: tuple
    lawlike: tuple = ()
    lawless: tuple = ()


def enumerate_domain(params: TruncationParams, k: int, enforce_guard: bool = True) -> Domain:
    """Truncated a_k together with d_k (when k < s) and the lawlike and lawless parts."""
    if enforce_guard:
        guard(params)
    if not 0 <= k <= params.s:
        raise ValueError(f"level {k} outside 0..{params.s}")
    u = universe(params)
    nodes = u.nodes(k) if k < params.s else ()
    if k == 0:
        return Domain(0, u.alphabet(0), nodes)
    tabs = u.tables(k)
    lawlike = tuple(f for f in tabs if u.is_lawlike(f))
    lawless = []
    for f in tabs:
        xi = u.certificate(f)
        if xi is not None:
            lawless.append(FunctionalTable(k, f.entries, f.name, xi))
    return Domain(k, tuple(tabs), nodes, lawlike, tuple(lawless))


def nu(params: TruncationParams, k: int, xi: Permutation) -> FunctionalTable:
    u = universe(params)
    if xi.level != k or len(xi.maps) != params.depth or not xi.is_bijection_on(u.alphabet(k - 1)):
        raise PreconditionError(f"not a level-{k} permutation family on the truncated carrier")
    return u.nu(k, xi)


def classify(params: TruncationParams, f: FunctionalTable) -> Kind:
    return universe(params).classify(f)


def parse_node(params: TruncationParams, text: str, width: int | None = None) -> NodeB:
    """Read a node such as '0,1/K1,L1_2'; '-' is an empty component."""
    u = universe(params)
    width = params.s if width is None else width
    parts = text.strip().split("/") if text.strip() else []
    if len(parts) == 1 and width > 1 and parts[0] in ("", "-"):
        parts = ["-"] * width
    if len(parts) != width:
        raise ValueError(f"expected {width} components in {text!r}")
    comps = []
    for j, part in enumerate(parts):
        items = [] if part.strip() in ("", "-") else [p.strip() for p in part.split(",")]
        if j == 0:
            comps.append(tuple(int(p) for p in items))
        else:
            names = {t.name: t for t in u.alphabet(j)}
            try:
                comps.append(tuple(names[p] for p in items))
            except KeyError as e:
                raise ValueError(f"unknown level-{j} entry {e.args[0]!r}") from None
    return NodeB(tuple(comps))


# ---------------------------------------------------------------- interpretation

def _successor(v, k: int):
    # S^0(x) = x+1 and S^{k+1}(f) = S^k o f
    if k == 0:
        return v + 1
    return FunctionalTable(k, {key: _successor(w, k - 1) for key, w in v.entries.items()})


def interp_expr(params: TruncationParams, Z, alpha: NodeB, env: Mapping | None = None):
    """Z^[alpha] under the truncation, or None when undefined."""
    env = env or {}
    u = universe(params)
    return _interp(u, Z, alpha, env)


def _interp(u: Universe, Z, alpha: NodeB, env):
    if isinstance(Z, Zero):
        return 0
    if isinstance(Z, K):
        return 0 if Z.level == 0 else u.konst(Z.level)
    if isinstance(Z, Var):
        if Z.var not in env:
            raise PreconditionError(f"unevaluated parameter {Z.var}")
        return env[Z.var]
    if isinstance(Z, Succ):
        v = _interp(u, Z.arg, alpha, env)
        return None if v is None else v + 1
    if isinstance(Z, (Plus, Times)):
        a = _interp(u, Z.left, alpha, env)
        b = _interp(u, Z.right, alpha, env)
        if a is None or b is None:
            return None
        return a + b if isinstance(Z, Plus) else a * b
    if isinstance(Z, N):
        v = _interp(u, Z.arg, alpha, env)
        return None if v is None else _successor(v, Z.level)
    if isinstance(Z, Ap):
        f = _interp(u, Z.fun, alpha, env)
        n = _interp(u, Z.arg, alpha, env)
        if f is None or n is None:
            return None
        return f(alpha.prefix(Z.level), n)
    raise PreconditionError(f"not an expression: {Z!r}")


_BUILTIN = {"lt": lambda a, b: a < b, "le": lambda a, b: a <= b}


class TV(enum.Enum):
    T = "forced"
    F = "not-forced"
    U = "unknown-at-D"


Verdict = TV


def _and3(a: TV, b: TV) -> TV:
    if a is TV.F or b is TV.F:
        return TV.F
    if a is TV.T and b is TV.T:
        return TV.T
    return TV.U


def _all3(vals: Iterable[TV]) -> TV:
    out = TV.T
    for v in vals:
        if v is TV.F:
            return TV.F
        if v is TV.U:
            out = TV.U
    return out


class _Bounded:
    """Three-valued forcing on the truncated tree.

    forced(phi, a): T when a forces phi in every completion of the truncation,
    F when it forces it in none, U otherwise.  never(phi, a) is the same for
    "no node at or below a forces phi".
    """

    def __init__(self, params: TruncationParams, carriers: Mapping, exhaustive: bool):
        self.params = params
        self.u = universe(params)
        self.carriers = carriers
        self.exhaustive = exhaustive
        self.memo: dict = {}

    def carrier(self, v: SortedVar):
        for key in ((v.level, v.kind), v.level):
            if key in self.carriers:
                return list(self.carriers[key])
        if v.level == 0:
            return list(range(self.params.depth))
        raise PreconditionError(f"no carrier given for {v}")

    # -- atoms
    def val(self, phi, a: NodeB, env) -> TV:
        """Val at a: T, F when false at a and every node below, U otherwise."""
        if isinstance(phi, Falsum):
            return TV.F
        if isinstance(phi, Eq):
            x = _interp(self.u, phi.left, a, env)
            y = _interp(self.u, phi.right, a, env)
            if x is None or y is None:
                return TV.U
            return TV.T if x == y else TV.F
        if isinstance(phi, Pred):
            if phi.name not in _BUILTIN:
                raise PreconditionError(f"no interpretation for predicate {phi.name}")
            args = [_interp(self.u, t, a, env) for t in phi.args]
            if any(x is None for x in args):
                return TV.U
            return TV.T if _BUILTIN[phi.name](*args) else TV.F
        if isinstance(phi, Proves):
            t = _interp(self.u, phi.term, a, env)
            if t is None:
                return TV.U
            if t > a.lh:
                # the ancestor of length t is not there yet; it may appear later
                return TV.U
            return self.forced(phi.inner, a.cut(t), env)
        raise PreconditionError(f"unsupported atom {phi!r}")

    def _key(self, tag, phi, a, env):
        return (tag, phi, a, tuple(sorted(env.items(), key=lambda kv: kv[0])))

    def forced(self, phi, a: NodeB, env) -> TV:
        key = self._key("f", phi, a, env)
        if key in self.memo:
            return self.memo[key]
        r = self._forced(phi, a, env)
        self.memo[key] = r
        return r

    def never(self, phi, a: NodeB, env) -> TV:
        key = self._key("n", phi, a, env)
        if key in self.memo:
            return self.memo[key]
        r = self._never(phi, a, env)
        self.memo[key] = r
        return r

    def _bar(self, local: Callable[[NodeB], TV], a: NodeB) -> TV:
        # local(b) is T when b is in the bar, F when no path through b can meet it
        v = local(a)
        if v is not TV.U:
            return v
        kids = self.u.children(a)
        if not kids:
            return TV.U
        return _all3(self._bar(local, c) for c in kids)

    def _forced(self, phi, a, env) -> TV:
        if isinstance(phi, (Falsum, Eq, Pred, Proves)):
            # a false Val never turns true below: both sides are already fixed
            return self._bar(lambda b: self.val(phi, b, env), a)
        if isinstance(phi, And):
            return _and3(self.forced(phi.left, a, env), self.forced(phi.right, a, env))
        if isinstance(phi, Or):
            def local(b):
                l, r = self.forced(phi.left, b, env), self.forced(phi.right, b, env)
                if TV.T in (l, r):
                    return TV.T
                if self.never(phi.left, b, env) is TV.T and self.never(phi.right, b, env) is TV.T:
                    return TV.F
                return TV.U
            return self._bar(local, a)
        if isinstance(phi, Exists):
            dom = self.carrier(phi.var)

            def local(b):
                vals = [self.forced(phi.body, b, {**env, phi.var: c}) for c in dom]
                if TV.T in vals:
                    return TV.T
                if self.exhaustive and all(self.never(phi.body, b, {**env, phi.var: c}) is TV.T
                                           for c in dom):
                    return TV.F
                return TV.U
            return self._bar(local, a)
        if isinstance(phi, Forall):
            dom = self.carrier(phi.var)
            vals = [self.forced(phi.body, a, {**env, phi.var: c}) for c in dom]
            r = _all3(vals)
            return TV.U if r is TV.T and not self.exhaustive else r
        if isinstance(phi, Implies):
            return self._implies(phi, a, env)
        raise PreconditionError(f"unsupported formula {phi!r}")

    def _implies(self, phi, a, env) -> TV:
        if self.forced(phi.right, a, env) is TV.T or self.never(phi.left, a, env) is TV.T:
            return TV.T
        l, r = self.forced(phi.left, a, env), self.forced(phi.right, a, env)
        if l is TV.T and r is TV.F:
            return TV.F
        local = TV.T if l is TV.F else TV.U
        kids = self.u.children(a)
        if not kids:
            # what happens beyond depth D is unknown
            return TV.U
        below = _all3(self.forced(phi, c, env) for c in kids)
        if below is TV.F:
            return TV.F
        return _and3(local, below)

    def _never(self, phi, a, env) -> TV:
        if isinstance(phi, Falsum):
            return TV.T
        if self.forced(phi, a, env) is TV.T:
            return TV.F
        if isinstance(phi, (Eq, Pred)):
            v = self.val(phi, a, env)
            if v is TV.F:
                return TV.T
        elif isinstance(phi, Proves):
            t = _interp(self.u, phi.term, a, env)
            if t is not None and t <= a.lh and self.forced(phi.inner, a.cut(t), env) is TV.F:
                return TV.T
        elif isinstance(phi, And):
            if TV.T in (self.never(phi.left, a, env), self.never(phi.right, a, env)):
                return TV.T
        elif isinstance(phi, Or):
            if self.never(phi.left, a, env) is TV.T and self.never(phi.right, a, env) is TV.T:
                return TV.T
        elif isinstance(phi, Implies):
            if self.forced(phi.left, a, env) is TV.T and self.never(phi.right, a, env) is TV.T:
                return TV.T
        elif isinstance(phi, Forall):
            if any(self.never(phi.body, a, {**env, phi.var: c}) is TV.T
                   for c in self.carrier(phi.var)):
                return TV.T
        elif isinstance(phi, Exists):
            if self.exhaustive and all(self.never(phi.body, a, {**env, phi.var: c}) is TV.T
                                       for c in self.carrier(phi.var)):
                return TV.T
        # otherwise decide from the truncated children
        kids = self.u.children(a)
        if not kids:
            return TV.U
        below = [self.never(phi, b, env) for b in kids]
        if TV.F in below:
            return TV.F
        return TV.T if all(v is TV.T for v in below) else TV.U


def force_bounded(params: TruncationParams, alpha: NodeB, phi, carriers: Mapping | None = None,
                  env: Mapping | None = None, exhaustive: bool = False) -> TV:
    """Three-valued forcing of phi at alpha in the truncated model.

    carriers maps a level (or a (level, kind) pair) to the candidate objects
    quantifiers range over.  With exhaustive=False they are treated as
    samples of an infinite domain, so an existential is refuted and a
    universal confirmed only when no quantifier needs the missing objects.
    """
    check_sorts(phi)
    if max_level(phi) > params.s:
        raise PreconditionError(f"formula uses levels above s={params.s}")
    eng = _Bounded(params, carriers or {}, exhaustive)
    return eng.forced(phi, alpha, dict(env or {}))


def val_atomic(params: TruncationParams, alpha: NodeB, atom, env: Mapping | None = None,
               carriers: Mapping | None = None) -> bool:
    """Val(alpha, atom); a proves-atom counts as true only when its inner forcing is certain."""
    eng = _Bounded(params, carriers or {}, False)
    return eng.val(atom, alpha, dict(env or {})) is TV.T


# ---------------------------------------------------------------- constructions

def lawless_extend(params: TruncationParams, f: FunctionalTable, x: int, gamma: NodeB) -> FunctionalTable:
    """A lawless h agreeing with f on 0..x at gamma.

    xi^[y] swaps the path entry of gamma at y with f(y)^[gamma] for y <= x
    and is the identity elsewhere; h = nu(xi).
    """
    u = universe(params)
    k = f.level
    carrier = u.alphabet(k - 1)
    if x >= params.depth:
        raise PreconditionError(f"x={x} outside the truncated numeric range")
    if gamma.lh <= x:
        raise PreconditionError(f"gamma has length {gamma.lh}, need more than x={x}")
    maps = []
    for y in range(params.depth):
        m = {v: v for v in carrier}
        if y <= x:
            target = f(gamma.prefix(k), y)
            if target is None:
                raise PreconditionError(f"f({y}) is undefined at gamma")
            if target not in m:
                raise PreconditionError(f"f({y}) at gamma is outside the truncated carrier")
            here = gamma.components[k - 1][y]
            m[here], m[target] = target, here
        maps.append(m)
    xi = Permutation.of(k, maps)
    return u.nu(k, xi)


class Transport:
    """Node permutation and functional transport generated by xi_0..xi_{s-1}."""

    def __init__(self, params: TruncationParams, xis: Sequence[Permutation]):
        self.params = params
        self.u = universe(params)
        if len(xis) != params.s:
            raise PreconditionError(f"need {params.s} permutation families, got {len(xis)}")
        for j, xi in enumerate(xis):
            if xi.level != j + 1 or not xi.is_bijection_on(self.u.alphabet(j)):
                raise PreconditionError(f"family {j} is not a bijection family on the level-{j} carrier")
        self.xis = tuple(xis)
        self._lam: dict = {}

    def eta(self) -> "Transport":
        return Transport(self.params, [xi.inverse() for xi in self.xis])

    def seq(self, j: int, entries: tuple) -> tuple:
        return tuple(self.xis[j](n, e) for n, e in enumerate(entries))

    def node(self, x: NodeB) -> NodeB:
        """xi-tilde on a node of any d_k."""
        return NodeB(tuple(self.seq(j, c) for j, c in enumerate(x.components)))

    def lam(self, k: int, f):
        """Lambda_k: Lambda_0 is the identity, Lambda_k(f)(x,n) = Lambda_{k-1}(f(xi~(x), n))."""
        if k == 0:
            return f
        key = (k, f)
        if key not in self._lam:
            ent = {}
            for x in self.u.nodes(k - 1):
                for n in range(self.params.depth):
                    v = f(self.node(x), n)
                    if v is not None:
                        ent[(x, n)] = self.lam(k - 1, v)
            self._lam[key] = FunctionalTable(k, ent, f.name if self.lam_fixes(f) else None)
        return self._lam[key]

    def lam_fixes(self, f) -> bool:
        return all(xi.is_identity() for xi in self.xis[:f.level])


def lambda_transport(params: TruncationParams, xis: Sequence[Permutation], k: int, f):
    return Transport(params, xis).lam(k, f)


def identity_families(params: TruncationParams) -> list[Permutation]:
    u = universe(params)
    return [Permutation.of(j + 1, [{v: v for v in u.alphabet(j)}] * params.depth)
            for j in range(params.s)]


def extension(params: TruncationParams, a: NodeB, m: int) -> NodeB:
    """Pad a node of d_{m-1} with constant functionals up to s components."""
    if not 1 <= m <= params.s or a.width != m:
        raise PreconditionError(f"expected a node with {m} components, 1 <= m <= s")
    u = universe(params)
    pads = tuple((u.konst(j),) * a.lh for j in range(m, params.s))
    return NodeB(a.components + pads)


def shortest(params: TruncationParams, alpha: NodeB, x: int,
             oracle: Callable[[NodeB, int], bool]) -> NodeB | None:
    """The shortest ancestor of alpha (alpha included) where the oracle holds."""
    for beta in alpha.ancestors():
        if oracle(beta, x):
            return beta
    return None


def choice_witness_m1(params: TruncationParams, alpha: NodeB,
                      psi: Callable[[NodeB, int, int], bool],
                      witnesses: Sequence[int] | None = None) -> FunctionalTable:
    """The level-1 choice function for forall x exists y psi(x, y) at alpha.

    f(u, x) = 0 off the cone of alpha once u is long enough, the least y with
    beta forcing psi(x, y) for the shortest ancestor beta of extension(u) that
    has a witness when u lies in the cone, and undefined otherwise.
    """
    u_ = universe(params)
    ys = list(witnesses) if witnesses is not None else list(range(max(params.base, params.depth)))
    top = alpha.prefix(1)

    def some(beta, x):
        return any(psi(beta, x, y) for y in ys)

    ent = {}
    for u in u_.nodes(0):
        for x in range(params.depth):
            if u.below(top):
                ext = extension(params, u, 1)
                if some(ext, x):
                    beta = shortest(params, ext, x, some)
                    ent[(u, x)] = next(y for y in ys if psi(beta, x, y))
            elif u.lh >= alpha.lh:
                ent[(u, x)] = 0
    f = FunctionalTable(1, ent, "choice")
    if not u_.is_monotone(f):
        raise PreconditionError("psi is not monotone along the tree")
    if not u_.is_complete(f):
        raise IncompleteError("some entry of the choice function is still undefined at depth D")
    return f


# ---------------------------------------------------------------- table files

def load_table(params: TruncationParams, text: str) -> FunctionalTable:
    """Read a level-1 table: lines 'entry <node> <n> = <value>'; '#' starts a comment."""
    level, ent, name = 1, {}, None
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        if head == "level":
            level = int(rest)
            if level != 1:
                raise ValueError("table files hold level-1 tables")
        elif head == "name":
            name = rest.strip()
        elif head == "entry":
            lhs, _, val = rest.partition("=")
            node_text, n_text = lhs.rsplit(None, 1) if len(lhs.split()) > 1 else ("-", lhs)
            node = parse_node(params, node_text, width=1)
            ent[(node, int(n_text))] = int(val)
        else:
            raise ValueError(f"unknown directive {head!r}")
    return FunctionalTable(level, ent, name)


def dump_table(f: FunctionalTable) -> str:
    if f.level != 1:
        raise ValueError("table files hold level-1 tables")
    lines = ["level 1"]
    if f.name:
        lines.append(f"name {f.name}")
    for (x, n), v in sorted(f.entries.items(), key=lambda kv: (kv[0][0].lh, kv[0][0].components, kv[0][1])):
        lines.append(f"entry {x} {n} = {v}")
    return "\n".join(lines) + "\n"
