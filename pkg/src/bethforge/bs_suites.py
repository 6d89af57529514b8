"""Executable lemma suites for the truncated functional model.

Each suite walks a fixed, finite instance space (described in its
docstring) and returns the number of checks made and the failures found.
Spaces that would be too large to enumerate at a given depth are replaced
by named representative families; the choice is deterministic.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Callable

from .model_bs import (
    IncompleteError, Kind, Permutation, PreconditionError, Transport, TruncationParams,
    choice_witness_m1, extension, force_bounded, interp_expr, lawless_extend, shortest, universe,
)
from .syntax_core import Ap, And, Eq, Implies, K, N, Or, Plus, Proves, SortedVar, Succ, Times, Var, neg, numeral

MAX_REPORTED = 20

F1 = SortedVar(1, 1, "functional")
G1 = SortedVar(2, 1, "functional")
H2 = SortedVar(3, 2, "functional")


@dataclass
class SuiteResult:
    name: str
    params: TruncationParams
    checked: int = 0
    failures: list = field(default_factory=list)
    failed: int = 0

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def check(self, cond: bool, what: Callable[[], str] | str) -> None:
        self.checked += 1
        if not cond:
            self.failed += 1
            if len(self.failures) < MAX_REPORTED:
                self.failures.append(what() if callable(what) else what)

    def line(self) -> str:
        p = self.params
        status = "ok" if self.ok else f"{self.failed} FAILED"
        return f"{self.name} s={p.s} D={p.depth} B={p.base}: {self.checked} checks, {status}"


# ---------------------------------------------------------------- instance spaces

def level1_tables(params: TruncationParams, full: bool | None = None) -> list:
    """All truncated a_1 tables when that is affordable, otherwise representatives."""
    u = universe(params)
    if full is None:
        full = u.count_tables(1) <= 5000
    if full:
        return u.tables(1)
    return list(u.alphabet(1)) + [u.path_reader(1), u.first_entry(1)]


def sampled_families(params: TruncationParams, k: int, count: int, seed: int = 0) -> list[Permutation]:
    """Identity first, then seeded random bijection families on the level k-1 alphabet."""
    u = universe(params)
    carrier = list(u.alphabet(k - 1))
    rng = random.Random(seed * 7919 + k)
    out = [Permutation.of(k, [{v: v for v in carrier}] * params.depth)]
    for _ in range(count):
        maps = []
        for _ in range(params.depth):
            img = carrier[:]
            rng.shuffle(img)
            maps.append(dict(zip(carrier, img)))
        out.append(Permutation.of(k, maps))
    return out


def level2_tables(params: TruncationParams, samples: int = 4, seed: int = 0) -> list:
    """K2, the path reader, the first-entry table and nu_2 of sampled families."""
    if params.s < 2:
        return []
    u = universe(params)
    out = [u.konst(2), u.path_reader(2), u.first_entry(2)]
    for i, xi in enumerate(sampled_families(params, 2, samples, seed)[1:]):
        out.append(u.nu(2, xi).renamed(f"nu2_{i}"))
    return out


def transposition_families(params: TruncationParams, k: int, limit: int | None = None) -> list[Permutation]:
    """Families whose every map is the identity or one transposition."""
    u = universe(params)
    carrier = list(u.alphabet(k - 1))
    choices = [{v: v for v in carrier}]
    for a, b in itertools.combinations(carrier, 2):
        m = {v: v for v in carrier}
        m[a], m[b] = b, a
        choices.append(m)
    out = []
    for combo in itertools.product(choices, repeat=params.depth):
        out.append(Permutation.of(k, list(combo)))
        if limit is not None and len(out) >= limit:
            break
    return out


def transports(params: TruncationParams, level1: int = 2, seed: int = 0) -> list[Transport]:
    """Every xi_0 family combined with the identity and a few sampled xi_1 families."""
    u = universe(params)
    fam0 = u.permutation_families(1)
    if params.s == 1:
        return [Transport(params, [x]) for x in fam0]
    fam1 = sampled_families(params, 2, level1, seed)
    return [Transport(params, [x, y]) for x in fam0 for y in fam1]


def expressions(params: TruncationParams, with_level2: bool = True, with_n2: bool = False) -> list[tuple]:
    """(level, expression, variables used) over F1, G1 and H2 with numeric arguments below D."""
    D = params.depth
    F, G, H = Var(F1), Var(G1), Var(H2)
    out = []
    for n in range(D):
        out.append((0, Ap(1, F, numeral(n)), {F1}))
    out += [
        (0, Succ(Ap(1, F, numeral(0))), {F1}),
        (0, Ap(1, N(1, F), numeral(D - 1)), {F1}),
        (0, Ap(1, K(1), numeral(0)), set()),
        (1, F, {F1}),
        (1, N(1, F), {F1}),
        (1, K(1), set()),
        (0, Plus(Ap(1, F, numeral(0)), Ap(1, G, numeral(D - 1))), {F1, G1}),
        (0, Times(Ap(1, G, numeral(0)), Succ(Ap(1, F, numeral(D - 1)))), {F1, G1}),
    ]
    if with_level2 and params.s >= 2:
        for n in range(D):
            out.append((1, Ap(2, H, numeral(n)), {H2}))
        out += [
            (0, Ap(1, Ap(2, H, numeral(0)), numeral(D - 1)), {H2}),
            (0, Plus(Ap(1, Ap(2, H, numeral(D - 1)), numeral(0)), Ap(1, F, numeral(0))), {F1, H2}),
            (0, Ap(1, Ap(2, K(2), numeral(0)), numeral(0)), set()),
            (2, H, {H2}),
        ]
        if with_n2:
            out.append((2, N(2, H), {H2}))
    return out


def _envs(params: TruncationParams, used: set, t1: list, t1_small: list, t2: list):
    """Assignments for the variables an expression uses."""
    pools = []
    for v in sorted(used):
        if v == F1:
            pools.append([(v, f) for f in (t1 if used <= {F1} else t1_small)])
        elif v == G1:
            pools.append([(v, f) for f in t1_small])
        else:
            pools.append([(v, f) for f in t2])
    for combo in itertools.product(*pools):
        yield dict(combo)


def _edges(u, nodes):
    for x in nodes:
        for c in u.children(x):
            yield x, c


def _in_level(u, level: int, v) -> bool:
    if level == 0:
        return isinstance(v, int) and v >= 0
    return u.in_carrier(v) and v.level == level


# ---------------------------------------------------------------- suites

def ap_predicate(params: TruncationParams) -> SuiteResult:
    """Ap^k(f, n) defined at alpha stays defined, with the same value, below alpha.

    Level 1: every truncated a_1 table (representatives when a_1 is too big).
    Level 2: the level-2 representatives.  alpha ranges over all of M and n
    over 0..D-1.  Persistence is checked along every edge of M, which gives
    it for every beta below alpha by transitivity.
    """
    r = SuiteResult("ap_predicate", params)
    u = universe(params)
    M = u.space()
    cases = [(1, f) for f in level1_tables(params)] + [(2, f) for f in level2_tables(params)]
    for k, f in cases:
        v = SortedVar(1, k, "functional")
        for n in range(params.depth):
            Z = Ap(k, Var(v), numeral(n))
            vals = {a: interp_expr(params, Z, a, {v: f}) for a in M}
            for a, c in _edges(u, M):
                if vals[a] is not None:
                    r.check(vals[c] == vals[a], lambda: f"{f.name or f!r} n={n} at {a} vs {c}")
    return r


def term_int(params: TruncationParams) -> SuiteResult:
    """Interpreted expressions: carrier, persistence, Val persistence and definedness on paths.

    Expressions are those of expressions(); single-variable level-1
    expressions range over all of level1_tables, the rest over the
    representative families.  Part 4 is checked on every maximal path of M.
    """
    r = SuiteResult("term_int", params)
    u = universe(params)
    M = u.space()
    t1 = level1_tables(params)
    t1_small = [u.konst(1), u.path_reader(1), u.first_entry(1)] + list(u.alphabet(1)[1:3])
    t2 = level2_tables(params, samples=2 if params.depth <= 2 else 1)
    paths = list(u.maximal_paths(params.s - 1))
    exprs = expressions(params, with_n2=params.depth <= 2)
    numeric = [(Z, used) for lvl, Z, used in exprs if lvl == 0]
    member: dict = {}
    for lvl, Z, used in exprs:
        for env in _envs(params, used, t1, t1_small, t2):
            vals = {a: interp_expr(params, Z, a, env) for a in M}
            for a, v in vals.items():
                if v is not None:
                    if (lvl, v) not in member:
                        member[(lvl, v)] = _in_level(u, lvl, v)
                    r.check(member[(lvl, v)],lambda: f"part 1: {Z} at {a} left the level-{lvl} carrier")
            for a, c in _edges(u, M):
                if vals[a] is not None:
                    r.check(vals[c] == vals[a], lambda: f"part 2: {Z} changed between {a} and {c}")
            for path in paths:
                r.check(any(vals[a] is not None for a in path), lambda: f"part 4: {Z} undefined along {path[-1]}")
    # part 3: Val of equations between numeric expressions persists
    pairs = [(a, b) for (a, ua), (b, ub) in itertools.combinations(numeric, 2) if (ua | ub) <= {F1, G1}][:12]
    for left, right in pairs:
        for env in _envs(params, {F1, G1}, t1_small, t1_small, t2):
            for a, c in _edges(u, M):
                x, y = interp_expr(params, left, a, env), interp_expr(params, right, a, env)
                if x is None or y is None:
                    continue
                x2, y2 = interp_expr(params, left, c, env), interp_expr(params, right, c, env)
                r.check(x2 is not None and y2 is not None and (x2 == y2) == (x == y),
                        lambda: f"part 3: {left} = {right} changed between {a} and {c}")
    return r


def lawless1(params: TruncationParams) -> SuiteResult:
    """For nu-certified f: f(n) is defined at alpha exactly when n < lh(alpha).

    f ranges over the lawless tables among level1_tables, the non-constant
    alphabet entries and nu_2 of the sampled level-2 families; alpha over M.
    """
    r = SuiteResult("lawless1", params)
    u = universe(params)
    M = u.space()
    cases = [(1, f) for f in level1_tables(params) if u.certificate(f) is not None]
    cases += [(1, f) for f in u.alphabet(1)[1:]]
    cases += [(2, f) for f in level2_tables(params) if f.name and (f.name.startswith("nu2") or f.name == "path2")]
    for k, f in cases:
        v = SortedVar(1, k, "functional")
        for a in M:
            for n in range(params.depth):
                d = interp_expr(params, Ap(k, Var(v), numeral(n)), a, {v: f}) is not None
                r.check(d == (n < a.lh), lambda: f"{f.name or f!r} n={n} at {a}")
    return r


def nu_roundtrip(params: TruncationParams) -> SuiteResult:
    """classify(nu(xi)) is lawless and the recovered certificate gives back the same table.

    Level 1: every family.  Level 2: every family when there are at most
    20000 of them, otherwise the sampled families.  Also pins the three
    reference tables: K is lawlike, the path reader lawless, first-entry neither.
    """
    r = SuiteResult("nu_roundtrip", params)
    u = universe(params)
    fams = [(1, xi) for xi in u.permutation_families(1)]
    if params.s >= 2:
        alph = len(u.alphabet(1))
        total = _fact(alph) ** params.depth
        level2 = u.permutation_families(2) if total <= 20000 else sampled_families(params, 2, 6)
        fams += [(2, xi) for xi in level2]
    for k, xi in fams:
        f = u.nu(k, xi)
        r.check(u.classify(f) is Kind.LAWLESS, lambda: f"nu_{k}({xi}) not lawless")
        cert = u.certificate(f)
        r.check(cert is not None and u.nu(k, cert) == f, lambda: f"nu_{k} certificate does not reproduce")
        r.check(cert == xi, lambda: f"nu_{k} certificate differs from the generating family")
    for k in range(1, params.s + 1):
        r.check(u.classify(u.konst(k)) is Kind.LAWLIKE, f"K{k} not lawlike")
        r.check(u.classify(u.path_reader(k)) is Kind.LAWLESS, f"path reader {k} not lawless")
        r.check(u.classify(u.first_entry(k)) is Kind.NEITHER, f"first-entry {k} misclassified")
    return r


def _fact(n):
    out = 1
    for i in range(2, n + 1):
        out *= i
    return out


def permutations_order(params: TruncationParams) -> SuiteResult:
    """xi-tilde is an order isomorphism of every truncated d_k.

    d_0: every xi_0 family, all pairs of nodes compared directly.
    d_1: every xi_0 family with every identity-or-transposition xi_1
    family (the first 24 at D=3): bijectivity, length preservation and
    commuting with cuts, which together give the order equivalence; plus
    a direct all-pairs comparison for the identity and two sampled xi_1.
    """
    r = SuiteResult("permutations_order", params)
    u = universe(params)
    fam0 = u.permutation_families(1)
    d0 = u.nodes(0)
    for xi in fam0:
        T = Transport(params, [xi] + identity_tail(params))
        img = {x: T.node(x) for x in d0}
        r.check(set(img.values()) == set(d0), "xi~_0 is not onto d_0")
        for x, y in itertools.product(d0, repeat=2):
            r.check(y.below(x) == img[y].below(img[x]), lambda: f"d_0 order at {x}, {y}")
    if params.s < 2:
        return r
    d1 = u.nodes(1)
    d1set = set(d1)
    limit = None if params.depth <= 2 else 24
    fam1 = transposition_families(params, 2, limit)
    for x0 in fam0:
        for x1 in fam1:
            T = Transport(params, [x0, x1])
            img = {x: T.node(x) for x in d1}
            r.check(len(set(img.values())) == len(d1) and set(img.values()) <= d1set, "xi~_1 not a bijection")
            for x in d1:
                y = img[x]
                r.check(y.lh == x.lh, lambda: f"length changed at {x}")
                if x.lh:
                    r.check(img[x.cut(x.lh - 1)] == y.cut(y.lh - 1), lambda: f"cut not preserved at {x}")
    if params.depth <= 2:
        for x0 in fam0:
            for x1 in sampled_families(params, 2, 2, 3):
                T = Transport(params, [x0, x1])
                img = {x: T.node(x) for x in d1}
                for x, y in itertools.product(d1, repeat=2):
                    r.check(y.below(x) == img[y].below(img[x]), lambda: f"d_1 order at {x}, {y}")
    return r


def identity_tail(params):
    u = universe(params)
    return [Permutation.of(j + 1, [{v: v for v in u.alphabet(j)}] * params.depth) for j in range(1, params.s)]


def _mutants(u, f) -> list:
    """A table with one deep entry dropped and one with a deep entry altered."""
    from .model_bs import FunctionalTable
    out = []
    deep = sorted((key for key in f.entries if key[0].lh == u.D), key=lambda kv: (str(kv[0]), kv[1]))
    if deep:
        ent = dict(f.entries)
        del ent[deep[0]]
        out.append(FunctionalTable(f.level, ent, "dropped"))
        ent = dict(f.entries)
        key = deep[-1]
        values = list(u.alphabet(f.level - 1))
        ent[key] = values[(values.index(ent[key]) + 1) % len(values)]
        out.append(FunctionalTable(f.level, ent, "altered"))
    return out


def permutations_carrier(params: TruncationParams) -> SuiteResult:
    """f in a_k iff Lambda_k(f) in a_k, and Lambda fixes lawlike tables.

    Level 1: every table of level1_tables and two mutants of each (one
    incomplete, one non-monotone unless the change happens to agree), under
    every xi_0 family.  Level 2: the level-2 representatives and their
    mutants under transports() (every fourth one at D=3).
    """
    r = SuiteResult("permutations_carrier", params)
    u = universe(params)
    t1 = level1_tables(params)
    tails = identity_tail(params)
    for xi in u.permutation_families(1):
        T = Transport(params, [xi] + tails)
        for f in t1:
            for g in [f] + _mutants(u, f):
                lam = T.lam(1, g)
                r.check(u.in_carrier(lam) == u.in_carrier(g), lambda: f"level 1 carrier changed for {g!r}")
            if u.is_lawlike(f):
                r.check(T.lam(1, f) == f, lambda: f"lawlike {f!r} moved")
    if params.s >= 2:
        t2 = level2_tables(params, samples=2)
        ts = transports(params, level1=2) if params.depth <= 2 else transports(params, level1=1)[::4]
        for T in ts:
            for f in t2:
                for g in [f] + _mutants(u, f):
                    lam = T.lam(2, g)
                    r.check(u.in_carrier(lam) == u.in_carrier(g), lambda: f"level 2 carrier changed for {g!r}")
                if u.is_lawlike(f):
                    r.check(T.lam(2, f) == f, lambda: f"lawlike {f!r} moved")
    return r


def lawless_extend_suite(params: TruncationParams) -> SuiteResult:
    """lawless_extend returns a lawless h agreeing with f on 0..x at gamma.

    f over level1_tables (and the level-2 representatives at D <= 2),
    x over 0..D-1, gamma over every node of M.  When gamma is too short
    the call must raise PreconditionError instead.
    """
    r = SuiteResult("lawless_extend", params)
    u = universe(params)
    M = u.space()
    cases = [(1, f) for f in level1_tables(params)]
    if params.depth <= 2:
        cases += [(2, f) for f in level2_tables(params, samples=1)]
    for k, f in cases:
        v = SortedVar(1, k, "functional")
        seen = {}
        for gamma in M:
            key = gamma.prefix(k)
            for x in range(params.depth):
                if (key, x) in seen and k == 1:
                    r.checked += 1
                    continue
                seen[(key, x)] = True
                if gamma.lh <= x:
                    try:
                        lawless_extend(params, f, x, gamma)
                        r.check(False, f"no PreconditionError for x={x} at {gamma}")
                    except PreconditionError:
                        r.check(True, "")
                    continue
                try:
                    h = lawless_extend(params, f, x, gamma)
                except PreconditionError:
                    r.check(any(f(gamma.prefix(k), y) is None for y in range(x + 1)),
                            lambda: f"spurious PreconditionError for {f!r} x={x} at {gamma}")
                    continue
                r.check(u.classify(h) is Kind.LAWLESS, lambda: f"h not lawless for {f!r} x={x} at {gamma}")
                for y in range(x + 1):
                    Zf = interp_expr(params, Ap(k, Var(v), numeral(y)), gamma, {v: f})
                    Zh = interp_expr(params, Ap(k, Var(v), numeral(y)), gamma, {v: h})
                    r.check(Zf == Zh and Zh is not None, lambda: f"h({y}) != f({y}) at {gamma}")
    return r


def extension_suite(params: TruncationParams) -> SuiteResult:
    """extension pads with constants and preserves length, on every node of every d_{m-1}."""
    r = SuiteResult("extension", params)
    u = universe(params)
    for m in range(1, params.s + 1):
        for a in u.nodes(m - 1):
            e = extension(params, a, m)
            r.check(e.lh == a.lh and e.width == params.s, lambda: f"shape of extension({a})")
            r.check(e.prefix(m) == a, lambda: f"extension({a}) lost its prefix")
            r.check(all(x == u.konst(j) for j in range(m, params.s) for x in e.components[j]),
                    lambda: f"extension({a}) padded with something other than K")
            if m == params.s:
                r.check(e == a, lambda: f"extension at m=s moved {a}")
    return r


def shortest_suite(params: TruncationParams) -> SuiteResult:
    """shortest returns the unique minimal ancestor with the oracle true.

    alpha ranges over M and the oracle over every subset of alpha's ancestors.
    """
    r = SuiteResult("shortest", params)
    u = universe(params)
    for alpha in u.space():
        for mask in range(1 << (alpha.lh + 1)):
            def oracle(b, x, mask=mask):
                return bool(mask >> b.lh & 1)
            got = shortest(params, alpha, 0, oracle)
            winners = [b for b in alpha.ancestors()
                       if oracle(b, 0) and not any(oracle(c, 0) for c in b.ancestors()[:-1])]
            if mask == 0:
                r.check(got is None and not winners, lambda: f"expected none at {alpha}")
            else:
                r.check(len(winners) == 1 and got == winners[0], lambda: f"mask {mask:b} at {alpha}")
    return r


CHOICE_PSIS = {
    "zero": lambda b, x, y: y == 0,
    "same": lambda b, x, y: y == x,
    "first-entry": lambda b, x, y: b.lh >= 1 and y == b.components[0][0],
    "entry-x": lambda b, x, y: b.lh > x and y == b.components[0][x],
}


def choice_witness_suite(params: TruncationParams) -> SuiteResult:
    """choice_witness_m1 against the case table, for every alpha in M and each psi of CHOICE_PSIS.

    The expected table is rebuilt by scanning ancestors directly.  A psi
    with no witnesses must raise IncompleteError.
    """
    r = SuiteResult("choice_witness", params)
    u = universe(params)
    ys = list(range(max(params.base, params.depth)))
    for alpha in u.space():
        for name, psi in CHOICE_PSIS.items():
            try:
                f = choice_witness_m1(params, alpha, psi)
            except (IncompleteError, PreconditionError) as exc:
                r.check(False, f"{name} at {alpha}: {exc}")
                continue
            r.check(u.is_monotone(f) and u.is_complete(f), lambda: f"{name} at {alpha}: not in a_1")
            top = alpha.prefix(1)
            for x0 in u.nodes(0):
                for x in range(params.depth):
                    want = None
                    if x0.below(top):
                        for b in extension(params, x0, 1).ancestors():
                            hits = [y for y in ys if psi(b, x, y)]
                            if hits:
                                want = hits[0]
                                break
                    elif x0.lh >= alpha.lh:
                        want = 0
                    r.check(f(x0, x) == want, lambda: f"{name} at {alpha}: f({x0}, {x}) = {f(x0, x)}, want {want}")
        try:
            choice_witness_m1(params, alpha, lambda b, x, y: False)
            r.check(False, f"no IncompleteError at {alpha}")
        except IncompleteError:
            r.check(True, "")
    return r


def equiv_nodes(params: TruncationParams) -> SuiteResult:
    """Transport of interpreted expressions and of quantifier-free forcing.

    With g = Lambda(f) and beta = xi~(alpha): Z(f) at beta is defined iff
    Z(g) at alpha is, and then Z(g) at alpha = Lambda(Z(f) at beta); and
    alpha forces phi(g) iff beta forces phi(f) (three-valued verdicts agree)
    for the quantifier-free formulas below.  Instances: transports() with
    the representative tables, alpha over M.
    """
    r = SuiteResult("equiv_nodes", params)
    u = universe(params)
    M = u.space()
    t1 = [u.konst(1), u.path_reader(1), u.first_entry(1)] + list(u.alphabet(1)[1:3])
    t2 = level2_tables(params, samples=1)
    exprs = expressions(params, with_level2=params.s >= 2)
    F, G = Var(F1), Var(G1)
    a0 = Eq(0, Ap(1, F, numeral(0)), Ap(1, G, numeral(0)))
    a1 = Eq(1, F, G)
    formulas = [a0, a1, Or(a0, neg(a0)), Implies(a1, a0), And(neg(a1), Or(a0, a1)),
                Proves(numeral(1), a0)]
    ts = transports(params, level1=1)
    if params.depth > 2:
        ts = ts[:4]
        M = [a for a in M if a.lh <= 2]
    for T in ts:
        lam = T.lam
        for lvl, Z, used in exprs:
            for env in _envs(params, used, t1, t1, t2):
                genv = {v: lam(v.level, f) for v, f in env.items()}
                for a in M:
                    b = T.node(a)
                    zf = interp_expr(params, Z, b, env)
                    zg = interp_expr(params, Z, a, genv)
                    r.check((zf is None) == (zg is None), lambda: f"definedness of {Z} at {a}")
                    if zf is not None and zg is not None:
                        r.check(zg == lam(lvl, zf), lambda: f"value of {Z} at {a}")
        if params.depth > 2:
            continue
        for phi in formulas:
            for f, g in itertools.product(t1[:3], repeat=2):
                env = {F1: f, G1: g}
                genv = {F1: lam(1, f), G1: lam(1, g)}
                for a in M:
                    vb = force_bounded(params, T.node(a), phi, env=env)
                    va = force_bounded(params, a, phi, env=genv)
                    r.check(va is vb, lambda: f"{phi} at {a}: {va} vs {vb}")
    return r


SUITES = {
    "ap_predicate": ap_predicate,
    "term_int": term_int,
    "lawless1": lawless1,
    "nu_roundtrip": nu_roundtrip,
    "permutations_order": permutations_order,
    "permutations_carrier": permutations_carrier,
    "lawless_extend": lawless_extend_suite,
    "extension": extension_suite,
    "shortest": shortest_suite,
    "choice_witness": choice_witness_suite,
    "equiv_nodes": equiv_nodes,
}


def run_suites(params: TruncationParams, names=None) -> list[SuiteResult]:
    names = list(SUITES) if names is None else list(names)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise KeyError(f"unknown suite(s): {', '.join(unknown)}")
    return [SUITES[n](params) for n in names]
