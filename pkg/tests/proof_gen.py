"""Random natural-deduction proofs, built forward from hypotheses and closed off at the end."""
import random

from bethforge.calculus import check_proof, node
from bethforge.syntax_core import (
    And, Eq, Exists, Falsum, Forall, Implies, Or, Pred, Succ, Var, Zero, free_vars, num_var, size,
    substitute,
)

VARS = [num_var(i) for i in range(3)]


def small_term(rng):
    k = rng.random()
    if k < 0.5:
        return Var(rng.choice(VARS))
    return Zero() if k < 0.8 else Succ(Zero())


def small_formula(rng, depth=1):
    if depth <= 0 or rng.random() < 0.55:
        k = rng.random()
        if k < 0.35:
            return Pred(rng.choice("pq"))
        if k < 0.8:
            return Pred("r", (small_term(rng),))
        if k < 0.93:
            return Eq(0, small_term(rng), small_term(rng))
        return Falsum()
    cls = rng.choice((And, Or, Implies))
    return cls(small_formula(rng, depth - 1), small_formula(rng, depth - 1))


def _without(assumptions, a):
    return tuple(x for x in assumptions if x != a)


def _merge(*groups):
    out = []
    for g in groups:
        for a in g:
            if a not in out:
                out.append(a)
    return tuple(out)


def _step(rng, pool):
    rule = rng.choice(("hyp", "and_i", "and_e", "or_i", "imp_i", "imp_i", "imp_e", "all_i",
                       "all_e", "ex_i", "ex_e", "or_e", "bot_e", "refl"))
    shape = {"and_e": And, "all_e": Forall, "ex_e": Exists, "or_e": Or, "bot_e": Falsum}.get(rule)
    fits = [q for q in pool if shape is None or isinstance(q.conclusion, shape)]
    if not fits:
        return None
    p = rng.choice(fits)
    c = p.conclusion
    if rule == "hyp":
        a = small_formula(rng, 1)
        return node("hyp", a, [a])
    if rule == "refl":
        t = small_term(rng)
        return node("eq_refl", Eq(0, t, t))
    if rule == "and_i":
        q = rng.choice(pool)
        return node("and_i", And(c, q.conclusion), _merge(p.assumptions, q.assumptions), [p, q])
    if rule == "and_e" and isinstance(c, And):
        left = rng.random() < 0.5
        return node("and_e1" if left else "and_e2", c.left if left else c.right, p.assumptions, [p])
    if rule == "or_i":
        b = small_formula(rng, 1)
        if rng.random() < 0.5:
            return node("or_i1", Or(c, b), p.assumptions, [p])
        return node("or_i2", Or(b, c), p.assumptions, [p])
    if rule == "imp_i":
        a = rng.choice(p.assumptions) if p.assumptions and rng.random() < 0.8 else small_formula(rng, 1)
        return node("imp_i", Implies(a, c), _without(p.assumptions, a), [p])
    if rule == "imp_e":
        for q in rng.sample(pool, len(pool)):
            if isinstance(q.conclusion, Implies):
                for r in pool:
                    if r.conclusion == q.conclusion.left:
                        return node("imp_e", q.conclusion.right, _merge(q.assumptions, r.assumptions), [q, r])
        return None
    if rule == "all_i":
        open_vars = set().union(*(free_vars(a) for a in p.assumptions)) if p.assumptions else set()
        cands = [v for v in free_vars(c) if v not in open_vars]
        if not cands:
            return None
        v = rng.choice(sorted(cands))
        return node("all_i", Forall(v, c), p.assumptions, [p], eigen=v)
    if rule == "all_e" and isinstance(c, Forall):
        t = small_term(rng)
        try:
            inst = substitute(c.body, c.var, t)
        except Exception:
            return None
        return node("all_e", inst, p.assumptions, [p], term=t)
    if rule == "ex_i":
        cands = sorted(free_vars(c))
        if cands:
            v = rng.choice(cands)
            return node("ex_i", Exists(v, c), p.assumptions, [p], term=Var(v))
        # abstract nothing: a vacuous witness
        v = rng.choice(VARS)
        if v in free_vars(c):
            return None
        return node("ex_i", Exists(v, c), p.assumptions, [p], term=Zero())
    if rule == "ex_e" and isinstance(c, Exists):
        y = c.var
        inst = c.body
        for q in rng.sample(pool, len(pool)):
            if inst in q.assumptions:
                others = _without(q.assumptions, inst)
                if any(y in free_vars(a) for a in others) or y in free_vars(q.conclusion):
                    continue
                return node("ex_e", q.conclusion, _merge(p.assumptions, others), [p, q], eigen=y)
        return None
    if rule == "or_e" and isinstance(c, Or):
        a, b = c.left, c.right
        left = node("or_i2", Or(b, a), [a], [node("hyp", a, [a])])
        right = node("or_i1", Or(b, a), [b], [node("hyp", b, [b])])
        return node("or_e", Or(b, a), p.assumptions, [p, left, right])
    if rule == "bot_e" and isinstance(c, Falsum):
        return node("bot_e", small_formula(rng, 1), p.assumptions, [p])
    return None


def close_off(p):
    """Discharge every assumption, then generalize every free variable."""
    while p.assumptions:
        a = p.assumptions[-1]
        p = node("imp_i", Implies(a, p.conclusion), _without(p.assumptions, a), [p])
    for v in sorted(free_vars(p.conclusion)):
        p = node("all_i", Forall(v, p.conclusion), (), [p], eigen=v)
    return p


def random_proof(rng: random.Random, steps: int = 25, max_size: int = 40):
    pool = []
    for _ in range(3):
        a = small_formula(rng, 1)
        pool.append(node("hyp", a, [a]))
    for _ in range(steps):
        q = _step(rng, pool)
        if q is not None and size(q.conclusion) <= max_size:
            pool.append(q)
    best = max(pool, key=lambda q: (q.size(), rng.random()))
    return close_off(best)


def proof_corpus(seed: int, count: int, steps: int = 25):
    """count proofs that the checker accepts in intuitionistic mode."""
    rng = random.Random(seed)
    out, rejected = [], 0
    while len(out) < count:
        p = random_proof(rng, steps)
        try:
            check_proof(p, None, classical=False)
        except Exception:
            rejected += 1
            continue
        out.append(p)
    return out, rejected
