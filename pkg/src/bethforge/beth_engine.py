"""Forcing over Beth frames presented as finite successor graphs.

A frame's tree is the unfolding of its successor graph from the root; a
state without successors ends every path through it.  Forcing is computed
on configurations, which are states enriched with whatever the walk so far
must remember: branch choices read by walk-sensitive function symbols, and
for creating-subject atoms the walk length and its prefixes up to the
largest index in play.  The configuration graph is finite, so bar clauses
become least fixpoints and the implication clause a reachability scan.
Configuration sets are int bitmasks.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Iterator

from .syntax_core import (
    And, Ap, BethForgeError, Eq, Exists, Falsum, Forall, Formula, Implies, K, Mem,
    N, Or, Plus, Pred, Proves, SortedVar, Succ, Times, Var, Zero, free_vars, parse,
    walk,
)


class DomainError(BethForgeError):
    pass


class UnsupportedError(BethForgeError):
    pass


BUILTIN_PREDICATES = {
    "lt": lambda a, b: a < b,
    "le": lambda a, b: a <= b,
}


class BranchTracker:
    """Walk memory for a level-1 symbol whose k-th value is the k-th branch choice."""

    def __init__(self, token: str, horizon: int):
        self.token = token
        self.horizon = horizon

    def start(self):
        return ()

    def step(self, mem, state, branch: int, nxt):
        return mem + (branch,) if len(mem) < self.horizon else mem

    def apply(self, mem, state, token, n: int):
        if token != self.token:
            return NotImplemented
        return mem[n] if 0 <= n < len(mem) else None


@dataclass(frozen=True, eq=False)
class BethFrame:
    states: tuple
    root: object
    succ: dict
    val: dict = field(default_factory=dict)
    carriers: dict = field(default_factory=lambda: {0: (0,)})
    funs: dict = field(default_factory=dict)
    tracker: object = None
    name: str = ""

    def atoms_at(self, state) -> frozenset:
        return self.val.get(state, frozenset())

    def level_of(self, token) -> int:
        if isinstance(token, int):
            return 0
        if isinstance(token, tuple) and token[0] == "K":
            return token[1]
        if isinstance(token, tuple) and token[0] == "N":
            return self.level_of(token[1])
        for lv, car in self.carriers.items():
            if token in car:
                return lv
        raise DomainError(f"{token!r} is in no carrier")

    def top(self) -> int:
        return max(self.carriers.get(0, (0,)))


def atom(name: str, *args) -> tuple:
    return (name, tuple(args))


# ---------------------------------------------------------------- frame checks

def validate_frame(frame: BethFrame) -> list[str]:
    out = []
    if not frame.states:
        return ["no root: the frame has no states"]
    if frame.root not in frame.states:
        out.append(f"no root: {frame.root!r} is not a state")
    for s in frame.states:
        for t in frame.succ.get(s, ()):
            if t not in frame.states:
                out.append(f"successor {t!r} of {s!r} is not a state")
                continue
            missing = frame.atoms_at(s) - frame.atoms_at(t)
            for a in sorted(missing, key=str):
                out.append(f"monotonicity: {_show_atom(a)} true at {s!r} but false at successor {t!r}")
            for tok, table in frame.funs.items():
                here, there = table.get(s, {}), table.get(t, {})
                for arg, v in here.items():
                    if there.get(arg) != v:
                        out.append(f"persistence: {tok}({arg}) = {v} at {s!r} but {there.get(arg)} at {t!r}")
    return out


def _show_atom(a) -> str:
    name, args = a
    return name if not args else f"{name}({', '.join(map(str, args))})"


# ---------------------------------------------------------------- configurations

class _Session:
    """Configuration graph of a frame plus memoized forcing sets."""

    def __init__(self, frame: BethFrame, zcap: int = -1):
        self.frame = frame
        self.zcap = zcap
        self.base = None if zcap < 0 else _Session(frame, -1)
        tr = frame.tracker
        root = (frame.root, tr.start() if tr else None, 0,
                ((frame.root, tr.start() if tr else None),) if zcap >= 0 else ())
        self.configs = [root]
        self.index = {root: 0}
        self.succ: list[list[int]] = []
        i = 0
        while i < len(self.configs):
            c = self.configs[i]
            out = []
            for t in self._next(c):
                j = self.index.get(t)
                if j is None:
                    j = len(self.configs)
                    self.index[t] = j
                    self.configs.append(t)
                out.append(j)
            self.succ.append(out)
            i += 1
        n = len(self.configs)
        self.all = (1 << n) - 1
        self.succmask = [sum(1 << j for j in set(js)) for js in self.succ]
        self.leaf = sum(1 << i for i in range(n) if not self.succ[i])
        self.reach = self._closure()
        self.memo: dict = {}

    def _next(self, c):
        state, mem, lh, prefixes = c
        tr = self.frame.tracker
        for b, t in enumerate(self.frame.succ.get(state, ())):
            m2 = tr.step(mem, state, b, t) if tr else None
            if self.zcap < 0:
                yield (t, m2, 0, ())
            elif lh < self.zcap:
                yield (t, m2, lh + 1, prefixes + ((t, m2),))
            else:
                yield (t, m2, self.zcap + 1, prefixes)

    def _closure(self) -> list[int]:
        n = len(self.configs)
        reach = [(1 << i) | self.succmask[i] for i in range(n)]
        changed = True
        while changed:
            changed = False
            for i in range(n):
                r = reach[i]
                acc = r
                m = r
                while m:
                    low = m & -m
                    j = low.bit_length() - 1
                    acc |= reach[j]
                    m ^= low
                if acc != r:
                    reach[i] = acc
                    changed = True
        return reach

    def config_of(self, walk_states: tuple) -> int:
        frame = self.frame
        if not walk_states or walk_states[0] != frame.root:
            raise DomainError("a walk must start at the root")
        cur = 0
        for prev, nxt in zip(walk_states, walk_states[1:]):
            succ = frame.succ.get(prev, ())
            if nxt not in succ:
                raise DomainError(f"{nxt!r} is not a successor of {prev!r}")
            b = succ.index(nxt)
            cur = self.succ[cur][b]
        return cur

    # bar: every maximal path from a configuration meets W
    def bar(self, w: int) -> int:
        x = w
        while True:
            add = 0
            m = self.all & ~x & ~self.leaf
            while m:
                low = m & -m
                i = low.bit_length() - 1
                if self.succmask[i] & ~x == 0:
                    add |= low
                m ^= low
            if not add:
                return x
            x |= add

    def always(self, good: int) -> int:
        # configurations all of whose reachable configurations are in good
        bad = self.all & ~good
        out = 0
        for i in range(len(self.configs)):
            if self.reach[i] & bad == 0:
                out |= 1 << i
        return out

    # terms
    def eval(self, e, ci: int, env: dict):
        frame = self.frame
        if isinstance(e, Zero):
            return 0
        if isinstance(e, Var):
            if e.var not in env:
                raise DomainError(f"unbound variable {e.var}")
            return env[e.var]
        if isinstance(e, K):
            return 0 if e.level == 0 else ("K", e.level)
        if isinstance(e, Succ):
            v = self.eval(e.arg, ci, env)
            return None if v is None else min(v + 1, frame.top())
        if isinstance(e, (Plus, Times)):
            a, b = self.eval(e.left, ci, env), self.eval(e.right, ci, env)
            if a is None or b is None:
                return None
            return min(a + b if isinstance(e, Plus) else a * b, frame.top())
        if isinstance(e, N):
            v = self.eval(e.arg, ci, env)
            return None if v is None else ("N", v)
        if isinstance(e, Ap):
            f, n = self.eval(e.fun, ci, env), self.eval(e.arg, ci, env)
            if f is None or n is None:
                return None
            return self.apply(f, n, ci)
        raise UnsupportedError(f"cannot evaluate {e}")

    def apply(self, tok, n: int, ci: int):
        frame = self.frame
        if isinstance(tok, tuple) and tok[0] == "K":
            return 0 if tok[1] == 1 else ("K", tok[1] - 1)
        if isinstance(tok, tuple) and tok[0] == "N":
            r = self.apply(tok[1], n, ci)
            if r is None:
                return None
            return min(r + 1, frame.top()) if frame.level_of(tok[1]) == 1 else ("N", r)
        state, mem, _, _ = self.configs[ci]
        if frame.tracker is not None:
            r = frame.tracker.apply(mem, state, tok, n)
            if r is not NotImplemented:
                return r
        table = frame.funs.get(tok)
        if table is None:
            raise DomainError(f"no interpretation for {tok!r}")
        return table.get(state, {}).get(n)

    # atoms
    def val(self, phi, ci: int, env: dict) -> bool:
        if isinstance(phi, Eq):
            a, b = self.eval(phi.left, ci, env), self.eval(phi.right, ci, env)
            return a is not None and b is not None and a == b
        if isinstance(phi, Pred):
            args = [self.eval(a, ci, env) for a in phi.args]
            if any(a is None for a in args):
                return False
            if phi.name in BUILTIN_PREDICATES:
                return BUILTIN_PREDICATES[phi.name](*args)
            return (phi.name, tuple(args)) in self.frame.atoms_at(self.configs[ci][0])
        if isinstance(phi, Proves):
            z = self.eval(phi.term, ci, env)
            if z is None:
                return False
            _, _, lh, prefixes = self.configs[ci]
            if self.base is None:
                raise UnsupportedError("session built without proves support")
            if z > self.zcap:
                raise DomainError(f"proves index {z} exceeds the configured bound {self.zcap}")
            if z >= len(prefixes):
                return False
            target = self.base.index[prefixes[z] + (0, ())]
            return bool(self.base.sat(phi.inner, env) >> target & 1)
        if isinstance(phi, Mem):
            raise UnsupportedError("membership atoms have no Beth interpretation here")
        raise UnsupportedError(f"not an atom: {phi}")

    def carrier(self, v: SortedVar):
        car = self.frame.carriers.get(v.level)
        if car is None:
            raise DomainError(f"no carrier for level {v.level}")
        return car

    def sat(self, phi, env: dict) -> int:
        fv = free_vars(phi)
        key = (phi, tuple(sorted(((v, env[v]) for v in fv if v in env), key=lambda kv: kv[0])))
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        missing = [v for v in fv if v not in env]
        if missing:
            raise DomainError(f"unbound variable {missing[0]}")
        out = self._sat(phi, env)
        self.memo[key] = out
        return out

    def _sat(self, phi, env: dict) -> int:
        if isinstance(phi, Falsum):
            return 0
        if isinstance(phi, (Eq, Pred, Proves, Mem)):
            w = 0
            for i in range(len(self.configs)):
                if self.val(phi, i, env):
                    w |= 1 << i
            return self.bar(w)
        if isinstance(phi, And):
            return self.sat(phi.left, env) & self.sat(phi.right, env)
        if isinstance(phi, Or):
            return self.bar(self.sat(phi.left, env) | self.sat(phi.right, env))
        if isinstance(phi, Implies):
            a = self.sat(phi.left, env)
            b = self.sat(phi.right, env)
            return self.always((self.all & ~a) | b)
        if isinstance(phi, Forall):
            out = self.all
            for d in self.carrier(phi.var):
                out &= self.sat(phi.body, {**env, phi.var: d})
                if not out:
                    break
            return out
        if isinstance(phi, Exists):
            w = 0
            for d in self.carrier(phi.var):
                w |= self.sat(phi.body, {**env, phi.var: d})
            return self.bar(w)
        raise UnsupportedError(f"cannot force {phi!r}")


def _proves_bound(frame: BethFrame, phi) -> int:
    if not any(isinstance(n, Proves) for n in walk(phi)):
        return -1
    return frame.top()


def _check_env(frame: BethFrame, env: dict):
    for v, d in env.items():
        car = frame.carriers.get(v.level)
        if car is None or d not in car:
            raise DomainError(f"{v} = {d!r} is outside the carrier")


class Forcer:
    """Reusable forcing session for one frame."""

    def __init__(self, frame: BethFrame, zcap: int = -1):
        self.frame = frame
        self.session = _Session(frame, zcap)

    def forced(self, phi, walk_states: tuple | None = None, env: dict | None = None) -> bool:
        env = dict(env or {})
        _check_env(self.frame, env)
        ci = self.session.config_of(tuple(walk_states or (self.frame.root,)))
        return bool(self.session.sat(phi, env) >> ci & 1)


def force(frame: BethFrame, alpha: tuple | None, phi: Formula, env: dict | None = None) -> bool:
    """Whether the walk alpha (root by default) forces phi under env."""
    return Forcer(frame, _proves_bound(frame, phi)).forced(phi, alpha, env)


def force_cs_atom(frame: BethFrame, alpha: tuple | None, t, inner: Formula, env: dict | None = None) -> bool:
    return force(frame, alpha, Proves(t, inner), env)


def walks(frame: BethFrame, max_len: int) -> Iterator[tuple]:
    """All walks from the root with at most max_len steps."""
    stack = [(frame.root,)]
    while stack:
        w = stack.pop()
        yield w
        if len(w) - 1 < max_len:
            for t in frame.succ.get(w[-1], ()):
                stack.append(w + (t,))


# ---------------------------------------------------------------- fixtures

def lem_fixture() -> BethFrame:
    return BethFrame(states=("r", "t"), root="r", succ={"r": ("r", "t"), "t": ()},
                     val={"r": frozenset(), "t": frozenset({atom("p")})}, name="lem")


MP_TOKEN = "f"


def mp_fixture(horizon: int = 7) -> BethFrame:
    return BethFrame(states=("z", "o"), root="z", succ={"z": ("z", "o"), "o": ("o",)},
                     carriers={0: tuple(range(horizon)), 1: (MP_TOKEN,)},
                     tracker=BranchTracker(MP_TOKEN, horizon), name="mp")


MP_F = SortedVar(1, 1, "functional")


def mp_env() -> dict:
    """F1_1 names the branch-tracking functional of mp_fixture."""
    return {MP_F: MP_TOKEN}


def mp_formulas() -> dict:
    """psi(x) = (ex k < x) f(k) > 0 and the three sentences about it."""
    psi = "ex x1. (lt(x1, x0) & lt(0, Ap1(F1_1, x1)))"
    return {
        "MR1": parse(f"all x0. ({psi} | ~{psi})", "L", 1),
        "MR2": parse(f"~~ex x0. {psi}", "L", 1),
        "MR3": parse(f"ex x0. {psi}", "L", 1),
    }


# ---------------------------------------------------------------- frame files

def load_frame(text: str) -> BethFrame:
    """Read the plain-text frame format.

        states r t
        root r
        succ r: r t
        true t: p q(1)
        carrier 0: 0 1 2
        carrier 1: f
        fun f r: 0=1 1=0
    """
    states, root, succ, val, carriers, funs = [], None, {}, {}, {}, {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        try:
            if head == "states":
                states = rest.split()
            elif head == "root":
                root = rest.strip()
            elif head == "succ":
                s, _, ts = rest.partition(":")
                succ[s.strip()] = tuple(ts.split())
            elif head == "true":
                s, _, atoms = rest.partition(":")
                val[s.strip()] = frozenset(_read_atom(a) for a in re.findall(r"\w+(?:\([^)]*\))?", atoms))
            elif head == "carrier":
                lv, _, elems = rest.partition(":")
                carriers[int(lv)] = tuple(int(x) if x.isdigit() else x for x in elems.split())
            elif head == "fun":
                spec, _, pairs = rest.partition(":")
                tok, s = spec.split()
                table = {}
                for pr in pairs.split():
                    a, b = pr.split("=")
                    table[int(a)] = int(b)
                funs.setdefault(tok, {})[s] = table
            else:
                raise ValueError(f"unknown directive {head!r}")
        except ValueError as exc:
            raise DomainError(f"frame line {lineno}: {exc}") from None
    if root is None and states:
        root = states[0]
    for s in states:
        succ.setdefault(s, ())
    return BethFrame(tuple(states), root, succ, val, carriers or {0: (0,)}, funs)


def _read_atom(text: str) -> tuple:
    m = re.fullmatch(r"(\w+)(?:\(([^)]*)\))?", text)
    name, args = m.group(1), m.group(2)
    vals = tuple(int(a) if a.strip().isdigit() else a.strip() for a in args.split(",")) if args else ()
    return (name, vals)


def dump_frame(frame: BethFrame) -> str:
    lines = [f"states {' '.join(map(str, frame.states))}", f"root {frame.root}"]
    for s in frame.states:
        lines.append(f"succ {s}: {' '.join(map(str, frame.succ.get(s, ())))}".rstrip())
    for s in frame.states:
        atoms = sorted(frame.atoms_at(s), key=str)
        if atoms:
            lines.append(f"true {s}: {' '.join(_show_atom(a).replace(' ', '') for a in atoms)}")
    for lv in sorted(frame.carriers):
        lines.append(f"carrier {lv}: {' '.join(map(str, frame.carriers[lv]))}")
    for tok, table in frame.funs.items():
        for s, t in table.items():
            lines.append(f"fun {tok} {s}: {' '.join(f'{a}={b}' for a, b in sorted(t.items()))}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- enumeration

def ground_atoms(phi, carrier: tuple) -> list[tuple]:
    """Ground instances of the non-builtin predicate letters of phi."""
    sigs = sorted({(n.name, len(n.args)) for n in walk(phi)
                   if isinstance(n, Pred) and n.name not in BUILTIN_PREDICATES})
    out = []
    for name, k in sigs:
        for args in itertools.product(carrier, repeat=k):
            out.append((name, tuple(args)))
    return out


def _reachable_all(succ: list[tuple], n: int) -> bool:
    seen, stack = {0}, [0]
    while stack:
        for t in succ[stack.pop()]:
            if t not in seen:
                seen.add(t)
                stack.append(t)
    return len(seen) == n


def _canonical(succ: list[tuple], n: int) -> bool:
    key = tuple(succ)
    for perm in itertools.permutations(range(1, n)):
        p = (0,) + perm
        inv = [0] * n
        for i, j in enumerate(p):
            inv[j] = i
        # relabel state i as p[i]
        img = [None] * n
        for i in range(n):
            img[p[i]] = tuple(sorted(p[t] for t in succ[i]))
        if tuple(img) < key:
            return False
    return True


def structures(n: int) -> Iterator[list[tuple]]:
    """Successor structures on n states rooted at 0, reachable, up to isomorphism."""
    subsets = [tuple(c) for k in range(n + 1) for c in itertools.combinations(range(n), k)]
    for combo in itertools.product(subsets, repeat=n):
        succ = list(combo)
        if _reachable_all(succ, n) and _canonical(succ, n):
            yield succ


def monotone_valuations(succ: list[tuple], n: int, atoms: list) -> Iterator[list[frozenset]]:
    subsets = [frozenset(c) for k in range(len(atoms) + 1) for c in itertools.combinations(atoms, k)]
    for combo in itertools.product(subsets, repeat=n):
        if all(combo[i] <= combo[j] for i in range(n) for j in succ[i]):
            yield list(combo)


def enumerate_frames(max_states: int, atoms: list, carriers: dict | None = None,
                     min_states: int = 1) -> Iterator[BethFrame]:
    carriers = carriers or {0: (0,)}
    for n in range(min_states, max_states + 1):
        names = tuple(f"s{i}" for i in range(n))
        for succ in structures(n):
            sm = {names[i]: tuple(names[j] for j in succ[i]) for i in range(n)}
            for vals in monotone_valuations(succ, n, atoms):
                yield BethFrame(names, names[0], sm, {names[i]: vals[i] for i in range(n)}, carriers)


def countermodel_search(phi: Formula, max_states: int = 4, max_carrier: int = 1,
                        env: dict | None = None):
    """First enumerated frame whose root does not force phi, with the refuted walk."""
    for size in range(1, max_carrier + 1):
        carriers = {0: tuple(range(size))}
        atoms = ground_atoms(phi, carriers[0])
        for frame in enumerate_frames(max_states, atoms, carriers):
            if not force(frame, None, phi, env):
                return frame, (frame.root,)
    return None
