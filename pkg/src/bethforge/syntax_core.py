"""Sorted abstract syntax for the four object languages.

Covers terms and functionals, formulas, parsing of the ASCII surface
syntax, printing, sort computation, capture-avoiding substitution and a
Goedel numbering built on Cantor pairing.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from math import isqrt
from typing import Iterable, Iterator, Union

KINDS = ("number", "functional", "lawlike", "lawless", "set")
LANGUAGES = ("L", "LP", "SLP", "TI")

# letters accepted for numeric variables besides x; each gets its own index block
_ALIAS_LETTERS = "xyzuvw"
_ALIAS_BLOCK = 1000


class BethForgeError(Exception):
    """Base class for every error raised by the package."""


class ParseError(BethForgeError):
    def __init__(self, message: str, pos: int | None = None, expected: str | None = None):
        self.pos = pos
        self.expected = expected
        where = f" at position {pos}" if pos is not None else ""
        exp = f" (expected {expected})" if expected else ""
        super().__init__(f"{message}{where}{exp}")


# the error contract names it SyntaxError; ParseError avoids shadowing the builtin
SyntaxError = ParseError  # noqa: A001


class SortError(BethForgeError):
    pass


class LanguageError(BethForgeError):
    pass


class DecodeError(BethForgeError):
    pass


# ---------------------------------------------------------------- variables

@dataclass(frozen=True, order=True)
class SortedVar:
    index: int
    level: int
    kind: str = "number"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SortError(f"unknown variable kind {self.kind!r}")
        if self.level < 0:
            raise SortError("negative level")
        if self.kind == "number" and self.level != 0:
            raise SortError("numeric variables have level 0")
        if self.kind in ("functional", "lawlike", "lawless") and self.level < 1:
            raise SortError(f"{self.kind} variables need level >= 1")

    def __str__(self):
        if self.kind == "number":
            block, i = divmod(self.index, _ALIAS_BLOCK)
            if 0 < block < len(_ALIAS_LETTERS) and self.index >= 0:
                return f"{_ALIAS_LETTERS[block]}{i}"
            return f"x{self.index}"
        prefix = {"functional": "F", "lawlike": "A", "lawless": "LF", "set": "X"}[self.kind]
        return f"{prefix}{self.level}_{self.index}"


def num_var(i: int) -> SortedVar:
    return SortedVar(i, 0, "number")


# ---------------------------------------------------------------- expressions

@dataclass(frozen=True)
class Zero:
    def __str__(self):
        return "0"


@dataclass(frozen=True)
class K:
    level: int

    def __str__(self):
        return f"K{self.level}"


@dataclass(frozen=True)
class Var:
    var: SortedVar

    def __str__(self):
        return str(self.var)


@dataclass(frozen=True)
class Succ:
    arg: "Expr"

    def __str__(self):
        return f"S({self.arg})"


@dataclass(frozen=True)
class Plus:
    left: "Expr"
    right: "Expr"

    def __str__(self):
        return _show_expr(self)


@dataclass(frozen=True)
class Times:
    left: "Expr"
    right: "Expr"

    def __str__(self):
        return _show_expr(self)


@dataclass(frozen=True)
class N:
    level: int
    arg: "Expr"

    def __str__(self):
        return f"N{self.level}({self.arg})"


@dataclass(frozen=True)
class Ap:
    level: int
    fun: "Expr"
    arg: "Expr"

    def __str__(self):
        return f"Ap{self.level}({self.fun}, {self.arg})"


Expr = Union[Zero, K, Var, Succ, Plus, Times, N, Ap]
EXPR_TYPES = (Zero, K, Var, Succ, Plus, Times, N, Ap)


def _show_expr(e, ctx: int = 0) -> str:
    # ctx: 0 = anywhere, 1 = operand of *, 2 = right operand of *
    if isinstance(e, Plus):
        s = f"{_show_expr(e.left, 0)} + {_show_expr(e.right, 1)}"
        return f"({s})" if ctx >= 1 else s
    if isinstance(e, Times):
        s = f"{_show_expr(e.left, 1)} * {_show_expr(e.right, 2)}"
        return f"({s})" if ctx >= 2 else s
    return str(e)


def numeral(n: int) -> Expr:
    e: Expr = Zero()
    for _ in range(n):
        e = Succ(e)
    return e


# ---------------------------------------------------------------- formulas

@dataclass(frozen=True)
class Falsum:
    def __str__(self):
        return "_|_"


@dataclass(frozen=True)
class Eq:
    level: int
    left: Expr
    right: Expr

    def __str__(self):
        return f"{self.left} ={self.level} {self.right}"


@dataclass(frozen=True)
class Mem:
    level: int
    elem: Expr
    set: Expr

    def __str__(self):
        return f"{self.elem} in{self.level} {self.set}"


@dataclass(frozen=True)
class Pred:
    """Predicate letter; used for propositional atoms in frames and for
    primitive recursive graph relations in a few schemas."""
    name: str
    args: tuple = ()

    def __str__(self):
        if not self.args:
            return self.name
        return f"{self.name}({', '.join(str(a) for a in self.args)})"


@dataclass(frozen=True)
class Proves:
    term: Expr
    inner: "Formula"

    def __str__(self):
        return f"proves({self.term}, {self.inner})"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"

    def __str__(self):
        return show(self)


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"

    def __str__(self):
        return show(self)


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"

    def __str__(self):
        return show(self)


@dataclass(frozen=True)
class Forall:
    var: SortedVar
    body: "Formula"

    def __str__(self):
        return show(self)


@dataclass(frozen=True)
class Exists:
    var: SortedVar
    body: "Formula"

    def __str__(self):
        return show(self)


Formula = Union[Falsum, Eq, Mem, Pred, Proves, And, Or, Implies, Forall, Exists]
ATOM_TYPES = (Falsum, Eq, Mem, Pred, Proves)
FORMULA_TYPES = (Falsum, Eq, Mem, Pred, Proves, And, Or, Implies, Forall, Exists)
Node = Union[Expr, Formula]


def neg(phi: Formula) -> Formula:
    return Implies(phi, Falsum())


def iff(a: Formula, b: Formula) -> Formula:
    return And(Implies(a, b), Implies(b, a))


def conj(parts: Iterable[Formula]) -> Formula:
    parts = list(parts)
    if not parts:
        return neg(Falsum())
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def is_neg(phi) -> bool:
    return isinstance(phi, Implies) and isinstance(phi.right, Falsum)


_P_IMP, _P_OR, _P_AND, _P_NOT = 1, 2, 3, 4


def show(phi: Formula, ctx: int = 0) -> str:
    """Print with the fewest parentheses the parser needs."""
    if isinstance(phi, (Forall, Exists)):
        q = "all" if isinstance(phi, Forall) else "ex"
        s = f"{q} {phi.var}. {show(phi.body, 0)}"
        return f"({s})" if ctx > 0 else s
    if is_neg(phi):
        return f"~{show(phi.left, _P_NOT)}"
    if isinstance(phi, Implies):
        s = f"{show(phi.left, _P_OR)} -> {show(phi.right, _P_IMP)}"
        return f"({s})" if ctx > _P_IMP else s
    if isinstance(phi, Or):
        s = f"{show(phi.left, _P_OR)} | {show(phi.right, _P_AND)}"
        return f"({s})" if ctx > _P_OR else s
    if isinstance(phi, And):
        s = f"{show(phi.left, _P_AND)} & {show(phi.right, _P_NOT)}"
        return f"({s})" if ctx > _P_AND else s
    return str(phi)


# ---------------------------------------------------------------- traversal

def children(node) -> tuple:
    if isinstance(node, (Succ,)):
        return (node.arg,)
    if isinstance(node, (Plus, Times, And, Or, Implies)):
        return (node.left, node.right)
    if isinstance(node, N):
        return (node.arg,)
    if isinstance(node, Ap):
        return (node.fun, node.arg)
    if isinstance(node, Eq):
        return (node.left, node.right)
    if isinstance(node, Mem):
        return (node.elem, node.set)
    if isinstance(node, Pred):
        return tuple(node.args)
    if isinstance(node, Proves):
        return (node.term, node.inner)
    if isinstance(node, (Forall, Exists)):
        return (node.body,)
    return ()


def walk(node) -> Iterator:
    yield node
    for c in children(node):
        yield from walk(c)


def all_vars(node) -> set[SortedVar]:
    out = set()
    for n in walk(node):
        if isinstance(n, Var):
            out.add(n.var)
        elif isinstance(n, (Forall, Exists)):
            out.add(n.var)
    return out


def free_vars(node) -> set[SortedVar]:
    if isinstance(node, Var):
        return {node.var}
    if isinstance(node, (Forall, Exists)):
        return free_vars(node.body) - {node.var}
    out = set()
    for c in children(node):
        out |= free_vars(c)
    return out


def size(node) -> int:
    return sum(1 for _ in walk(node))


def depth(node) -> int:
    cs = children(node)
    return 1 + max((depth(c) for c in cs), default=0)


def fresh_var(like: SortedVar, avoid: set[SortedVar]) -> SortedVar:
    used = {v.index for v in avoid}
    i = max(used | {like.index}) + 1
    return SortedVar(i, like.level, like.kind)


# ---------------------------------------------------------------- sorts

def expr_level(e: Expr) -> int:
    """Level of a well-sorted expression; raises SortError otherwise."""
    if isinstance(e, Zero):
        return 0
    if isinstance(e, K):
        if e.level < 0:
            raise SortError("negative level on K")
        return e.level
    if isinstance(e, Var):
        return e.var.level
    if isinstance(e, Succ):
        if expr_level(e.arg) != 0:
            raise SortError(f"S applied to a non-numeric expression {e.arg}")
        return 0
    if isinstance(e, (Plus, Times)):
        if expr_level(e.left) != 0 or expr_level(e.right) != 0:
            raise SortError(f"arithmetic on non-numeric expressions in {e}")
        return 0
    if isinstance(e, N):
        if e.level < 1:
            raise SortError("N needs level >= 1")
        if expr_level(e.arg) != e.level:
            raise SortError(f"N{e.level} applied to {e.arg} of level {expr_level(e.arg)}")
        return e.level
    if isinstance(e, Ap):
        if e.level < 1:
            raise SortError("Ap needs level >= 1")
        fl = expr_level(e.fun)
        if fl != e.level:
            raise SortError(f"Ap{e.level} applied to {e.fun} of level {fl}")
        if expr_level(e.arg) != 0:
            raise SortError(f"Ap argument {e.arg} is not numeric")
        return e.level - 1
    raise SortError(f"not an expression: {e!r}")


def check_sorts(phi) -> None:
    """Raise SortError unless phi (formula or expression) is well-sorted."""
    if isinstance(phi, EXPR_TYPES):
        expr_level(phi)
        return
    if isinstance(phi, Falsum):
        return
    if isinstance(phi, Eq):
        a, b = expr_level(phi.left), expr_level(phi.right)
        if a != phi.level or b != phi.level:
            raise SortError(f"={phi.level} between levels {a} and {b}")
        return
    if isinstance(phi, Mem):
        a, b = expr_level(phi.elem), expr_level(phi.set)
        if a != phi.level or b != phi.level + 1:
            raise SortError(f"in{phi.level} between levels {a} and {b}")
        return
    if isinstance(phi, Pred):
        for a in phi.args:
            expr_level(a)
        return
    if isinstance(phi, Proves):
        if expr_level(phi.term) != 0:
            raise SortError("proves index must be numeric")
        if any(isinstance(n, Proves) for n in walk(phi.inner)):
            raise SortError("proves may not nest")
        check_sorts(phi.inner)
        return
    if isinstance(phi, (And, Or, Implies)):
        check_sorts(phi.left)
        check_sorts(phi.right)
        return
    if isinstance(phi, (Forall, Exists)):
        check_sorts(phi.body)
        return
    raise SortError(f"not a formula: {phi!r}")


def max_level(node) -> int:
    lv = 0
    for n in walk(node):
        if isinstance(n, Var):
            lv = max(lv, n.var.level)
        elif isinstance(n, (K, N, Ap)):
            lv = max(lv, n.level)
        elif isinstance(n, (Forall, Exists)):
            lv = max(lv, n.var.level)
        elif isinstance(n, Mem):
            lv = max(lv, n.level + 1)
        elif isinstance(n, Eq):
            lv = max(lv, n.level)
    return lv


def check_language(phi, language: str, s: int) -> None:
    """Raise LanguageError if phi uses symbols outside the language."""
    if language not in LANGUAGES:
        raise LanguageError(f"unknown language {language!r}")
    if max_level(phi) > s:
        raise LanguageError(f"level above s={s} in {phi}")
    for n in walk(phi):
        kind = None
        if isinstance(n, Var):
            kind = n.var.kind
        elif isinstance(n, (Forall, Exists)):
            kind = n.var.kind
        if language == "TI":
            if isinstance(n, (K, N, Ap, Proves, Pred)):
                raise LanguageError(f"{type(n).__name__} is not a TI symbol")
            if kind in ("functional", "lawlike", "lawless"):
                raise LanguageError(f"{kind} variable in TI")
            continue
        if isinstance(n, Mem):
            raise LanguageError(f"membership is only available in TI: {n}")
        if kind == "set":
            raise LanguageError("set variables are only available in TI")
        if isinstance(n, Proves):
            if language == "L":
                raise LanguageError("proves is not a symbol of L")
            check_language(n.inner, "L", s)
        if kind == "lawless" and language != "SLP":
            raise LanguageError("lawless variables need SLP")


def sort_of(phi) -> int:
    """Maximal level of a parameter; 0 without parameters."""
    return max((v.level for v in free_vars(phi)), default=0)


def closure(phi: Formula) -> Formula:
    """Universally bind every free variable, lowest (index, level) outermost."""
    out = phi
    for v in sorted(free_vars(phi), key=lambda v: (v.index, v.level, v.kind), reverse=True):
        out = Forall(v, out)
    return out


# ---------------------------------------------------------------- substitution

def _subst(node, mapping: dict):
    if not mapping:
        return node
    if isinstance(node, Var):
        return mapping.get(node.var, node)
    if isinstance(node, (Zero, K, Falsum)):
        return node
    if isinstance(node, Succ):
        return Succ(_subst(node.arg, mapping))
    if isinstance(node, Plus):
        return Plus(_subst(node.left, mapping), _subst(node.right, mapping))
    if isinstance(node, Times):
        return Times(_subst(node.left, mapping), _subst(node.right, mapping))
    if isinstance(node, N):
        return N(node.level, _subst(node.arg, mapping))
    if isinstance(node, Ap):
        return Ap(node.level, _subst(node.fun, mapping), _subst(node.arg, mapping))
    if isinstance(node, Eq):
        return Eq(node.level, _subst(node.left, mapping), _subst(node.right, mapping))
    if isinstance(node, Mem):
        return Mem(node.level, _subst(node.elem, mapping), _subst(node.set, mapping))
    if isinstance(node, Pred):
        return Pred(node.name, tuple(_subst(a, mapping) for a in node.args))
    if isinstance(node, Proves):
        return Proves(_subst(node.term, mapping), _subst(node.inner, mapping))
    if isinstance(node, (And, Or, Implies)):
        return type(node)(_subst(node.left, mapping), _subst(node.right, mapping))
    if isinstance(node, (Forall, Exists)):
        v = node.var
        inner = {k: e for k, e in mapping.items() if k != v}
        live = {k: e for k, e in inner.items() if k in free_vars(node.body)}
        if not live:
            return node
        incoming = set()
        for e in live.values():
            incoming |= free_vars(e)
        if v in incoming:
            avoid = all_vars(node) | incoming | set(live)
            w = fresh_var(v, avoid)
            body = _subst(node.body, {v: Var(w)})
            return type(node)(w, _subst(body, live))
        return type(node)(v, _subst(node.body, live))
    raise TypeError(f"cannot substitute into {node!r}")


def kind_compatible(v: SortedVar, e: Expr) -> bool:
    if v.kind == "lawless":
        return isinstance(e, Var) and e.var.kind == "lawless"
    if v.kind == "lawlike":
        return all(u.kind in ("number", "lawlike") for u in free_vars(e))
    if v.kind == "set" and v.level > 0:
        return isinstance(e, Var) and e.var.kind == "set"
    return True


def substitute(phi, v: SortedVar, e: Expr):
    """Replace free occurrences of v by e, renaming binders to avoid capture."""
    if expr_level(e) != v.level:
        raise SortError(f"cannot put {e} (level {expr_level(e)}) for {v} (level {v.level})")
    if not kind_compatible(v, e):
        raise SortError(f"{e} cannot replace the {v.kind} variable {v}")
    return _subst(phi, {v: e})


def substitute_many(phi, mapping: dict):
    for v, e in mapping.items():
        if expr_level(e) != v.level:
            raise SortError(f"cannot put {e} for {v}")
    return _subst(phi, dict(mapping))


def rename_bound(phi, counter: list[int] | None = None):
    """Canonical form: bound variables renamed to negative indices in binding order."""
    if counter is None:
        counter = [0]
    if isinstance(phi, (Forall, Exists)):
        counter[0] += 1
        w = SortedVar(-counter[0], phi.var.level, phi.var.kind)
        body = _subst(phi.body, {phi.var: Var(w)})
        return type(phi)(w, rename_bound(body, counter))
    if isinstance(phi, (And, Or, Implies)):
        return type(phi)(rename_bound(phi.left, counter), rename_bound(phi.right, counter))
    if isinstance(phi, Proves):
        return Proves(phi.term, rename_bound(phi.inner, counter))
    return phi


def alpha_eq(a, b) -> bool:
    return rename_bound(a) == rename_bound(b)


# ---------------------------------------------------------------- lexer

_TOKEN = re.compile(r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<sym>_\|_|<->|->|[&|~(),.+*=])
  | (?P<num>\d+)
  | (?P<ident>[A-Za-z][A-Za-z0-9_]*)
""", re.VERBOSE)


@dataclass
class _Tok:
    kind: str
    text: str
    pos: int
    attached: bool


def _lex(text: str) -> list[_Tok]:
    toks, pos, prev_ws = [], 0, True
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind == "ws":
            prev_ws = True
        else:
            toks.append(_Tok(kind, m.group(), pos, not prev_ws))
            prev_ws = False
        pos = m.end()
    toks.append(_Tok("eof", "", len(text), False))
    return toks


_VAR_RE = re.compile(r"^(LF|F|A|X)(\d+)(?:_(\d+))?$")
_NUMVAR_RE = re.compile(r"^([xyzuvw])(\d+)$")
_KEYWORDS = {"all", "ex", "proves", "in", "S"}


def _classify_ident(t: str):
    m = _NUMVAR_RE.match(t)
    if m:
        i = int(m.group(2))
        if m.group(1) != "x" and i >= _ALIAS_BLOCK:
            return None
        return ("var", num_var(_ALIAS_LETTERS.index(m.group(1)) * _ALIAS_BLOCK + i))
    m = _VAR_RE.match(t)
    if m:
        prefix, lv = m.group(1), int(m.group(2))
        idx = int(m.group(3)) if m.group(3) is not None else 1
        kind = {"F": "functional", "A": "lawlike", "LF": "lawless", "X": "set"}[prefix]
        if kind == "set" and lv == 0:
            return ("var", num_var(idx))
        try:
            return ("var", SortedVar(idx, lv, kind))
        except SortError:
            return None
    return None


class _Parser:
    def __init__(self, text: str):
        self.toks = _lex(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def peek(self, k=1) -> _Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def advance(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text: str) -> _Tok:
        if self.tok.text != text:
            raise ParseError(f"unexpected {self.tok.text or 'end of input'!r}", self.tok.pos, repr(text))
        return self.advance()

    # formulas
    def formula(self):
        left = self.imp()
        if self.tok.text == "<->":
            self.advance()
            right = self.formula()
            return iff(left, right)
        return left

    def imp(self):
        left = self.disj()
        if self.tok.text == "->":
            self.advance()
            return Implies(left, self.imp())
        return left

    def disj(self):
        left = self.conj()
        while self.tok.text == "|":
            self.advance()
            left = Or(left, self.conj())
        return left

    def conj(self):
        left = self.unary()
        while self.tok.text == "&":
            self.advance()
            left = And(left, self.unary())
        return left

    def unary(self):
        t = self.tok
        if t.text == "~":
            self.advance()
            return neg(self.unary())
        if t.text in ("all", "ex"):
            self.advance()
            vt = self.tok
            if vt.kind != "ident" or _classify_ident(vt.text) is None:
                raise ParseError("bad quantified variable", vt.pos, "a variable")
            self.advance()
            v = _classify_ident(vt.text)[1]
            self.expect(".")
            body = self.formula()
            return (Forall if t.text == "all" else Exists)(v, body)
        return self.primary()

    def primary(self):
        t = self.tok
        if t.text == "_|_":
            self.advance()
            return Falsum()
        if t.text == "(":
            save = self.i
            try:
                self.advance()
                f = self.formula()
                self.expect(")")
                if self.tok.text not in ("=", "+", "*") and not re.fullmatch(r"in\d*", self.tok.text):
                    return f
            except ParseError:
                pass
            self.i = save
        if t.text == "proves":
            self.advance()
            self.expect("(")
            term = self.term()
            self.expect(",")
            inner = self.formula()
            self.expect(")")
            return Proves(term, inner)
        if t.kind == "ident" and t.text[0].islower() and t.text not in _KEYWORDS \
                and not re.fullmatch(r"in\d*", t.text) and _classify_ident(t.text) is None:
            self.advance()
            args = []
            if self.tok.text == "(" and self.tok.attached:
                self.advance()
                args.append(self.term())
                while self.tok.text == ",":
                    self.advance()
                    args.append(self.term())
                self.expect(")")
            return Pred(t.text, tuple(args))
        left = self.term()
        op = self.tok
        if op.text == "=":
            self.advance()
            level = None
            nt = self.tok
            if nt.kind == "num" and nt.attached and self._starts_term(self.peek()):
                level = int(nt.text)
                self.advance()
            right = self.term()
            if level is None:
                level = expr_level(left)
            return Eq(level, left, right)
        if op.kind == "ident" and re.fullmatch(r"in\d*", op.text):
            self.advance()
            level = int(op.text[2:]) if len(op.text) > 2 else expr_level(left)
            right = self.term()
            return Mem(level, left, right)
        raise ParseError(f"unexpected {op.text or 'end of input'!r}", op.pos, "'=' or 'in'")

    @staticmethod
    def _starts_term(t: _Tok) -> bool:
        return t.kind in ("num", "ident") or t.text == "("

    # terms
    def term(self):
        left = self.product()
        while self.tok.text == "+":
            self.advance()
            left = Plus(left, self.product())
        return left

    def product(self):
        left = self.tatom()
        while self.tok.text == "*":
            self.advance()
            left = Times(left, self.tatom())
        return left

    def tatom(self):
        t = self.tok
        if t.kind == "num":
            self.advance()
            e = numeral(int(t.text))
        elif t.text == "(":
            self.advance()
            e = self.term()
            self.expect(")")
        elif t.kind == "ident":
            self.advance()
            text = t.text
            if text == "S":
                self.expect("(")
                a = self.term()
                self.expect(")")
                e = Succ(a)
            elif re.fullmatch(r"K\d+", text):
                e = K(int(text[1:]))
            elif re.fullmatch(r"N\d+", text):
                self.expect("(")
                a = self.term()
                self.expect(")")
                e = N(int(text[1:]), a)
            elif re.fullmatch(r"Ap\d+", text):
                self.expect("(")
                f = self.term()
                self.expect(",")
                a = self.term()
                self.expect(")")
                e = Ap(int(text[2:]), f, a)
            else:
                c = _classify_ident(text)
                if c is None:
                    raise ParseError(f"unknown symbol {text!r}", t.pos, "a term")
                e = Var(c[1])
        else:
            raise ParseError(f"unexpected {t.text or 'end of input'!r}", t.pos, "a term")
        # application sugar: Z(t) for a functional Z
        while self.tok.text == "(" and self.tok.attached and _safe_level(e) >= 1:
            self.advance()
            a = self.term()
            self.expect(")")
            e = Ap(_safe_level(e), e, a)
        return e


def _safe_level(e) -> int:
    try:
        return expr_level(e)
    except SortError:
        return -1


def parse(text: str, language: str = "SLP", s: int = 2, kind: str = "formula"):
    """Parse a formula (or, with kind='expr', an expression) and check it."""
    p = _Parser(text)
    node = p.formula() if kind == "formula" else p.term()
    if p.tok.kind != "eof":
        raise ParseError(f"trailing input {p.tok.text!r}", p.tok.pos, "end of input")
    check_sorts(node)
    check_language(node, language, s)
    return node


def parse_lines(text: str, language: str = "SLP", s: int = 2) -> list:
    out = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            out.append(parse(line, language, s))
    return out


# ---------------------------------------------------------------- Goedel numbers

def cantor_pair(a: int, b: int) -> int:
    return (a + b) * (a + b + 1) // 2 + b


def cantor_unpair(z: int) -> tuple[int, int]:
    w = (isqrt(8 * z + 1) - 1) // 2
    t = w * (w + 1) // 2
    b = z - t
    return w - b, b


_TAGS = {Zero: 0, K: 1, Var: 2, Succ: 3, Plus: 4, Times: 5, N: 6, Ap: 7,
         Falsum: 8, Eq: 9, Mem: 10, Proves: 11, And: 12, Or: 13, Implies: 14,
         Forall: 15, Exists: 16, Pred: 17}


def _enc_var(v: SortedVar) -> int:
    return cantor_pair(cantor_pair(v.index, v.level), KINDS.index(v.kind))


def _enc_list(codes: list[int]) -> int:
    out = 0
    for c in reversed(codes):
        out = 1 + cantor_pair(c, out)
    return out


def _dec_list(z: int) -> list[int]:
    out = []
    while z:
        c, z = cantor_unpair(z - 1)
        out.append(c)
    return out


def godel_encode(node) -> int:
    """Structural code: pair(tag, payload), children coded recursively."""
    tag = _TAGS[type(node)]
    if isinstance(node, (Zero, Falsum)):
        payload = 0
    elif isinstance(node, K):
        payload = node.level
    elif isinstance(node, Var):
        payload = _enc_var(node.var)
    elif isinstance(node, Succ):
        payload = godel_encode(node.arg)
    elif isinstance(node, (Plus, Times, And, Or, Implies)):
        payload = cantor_pair(godel_encode(node.left), godel_encode(node.right))
    elif isinstance(node, N):
        payload = cantor_pair(node.level, godel_encode(node.arg))
    elif isinstance(node, Ap):
        payload = cantor_pair(node.level, cantor_pair(godel_encode(node.fun), godel_encode(node.arg)))
    elif isinstance(node, Eq):
        payload = cantor_pair(node.level, cantor_pair(godel_encode(node.left), godel_encode(node.right)))
    elif isinstance(node, Mem):
        payload = cantor_pair(node.level, cantor_pair(godel_encode(node.elem), godel_encode(node.set)))
    elif isinstance(node, Proves):
        payload = cantor_pair(godel_encode(node.term), godel_encode(node.inner))
    elif isinstance(node, (Forall, Exists)):
        payload = cantor_pair(_enc_var(node.var), godel_encode(node.body))
    elif isinstance(node, Pred):
        name = int.from_bytes(node.name.encode("ascii"), "big")
        payload = cantor_pair(name, _enc_list([godel_encode(a) for a in node.args]))
    else:
        raise TypeError(f"cannot encode {node!r}")
    return cantor_pair(tag, payload)


def _dec_var(z: int) -> SortedVar:
    il, kind = cantor_unpair(z)
    index, level = cantor_unpair(il)
    if kind >= len(KINDS):
        raise DecodeError(f"bad kind code {kind}")
    try:
        return SortedVar(index, level, KINDS[kind])
    except SortError as exc:
        raise DecodeError(str(exc)) from None


def _decode(code: int):
    tag, p = cantor_unpair(code)
    if tag in (0, 8):
        if p:
            raise DecodeError(f"{code} has a payload on a nullary symbol")
        return Zero() if tag == 0 else Falsum()
    if tag == 1:
        return K(p)
    if tag == 2:
        return Var(_dec_var(p))
    if tag == 3:
        return Succ(_decode(p))
    if tag in (4, 5, 12, 13, 14):
        a, b = cantor_unpair(p)
        cls = {4: Plus, 5: Times, 12: And, 13: Or, 14: Implies}[tag]
        return cls(_decode(a), _decode(b))
    if tag == 6:
        lv, a = cantor_unpair(p)
        return N(lv, _decode(a))
    if tag in (7, 9, 10):
        lv, ab = cantor_unpair(p)
        a, b = cantor_unpair(ab)
        cls = {7: Ap, 9: Eq, 10: Mem}[tag]
        return cls(lv, _decode(a), _decode(b))
    if tag == 11:
        a, b = cantor_unpair(p)
        return Proves(_decode(a), _decode(b))
    if tag in (15, 16):
        v, b = cantor_unpair(p)
        return (Forall if tag == 15 else Exists)(_dec_var(v), _decode(b))
    if tag == 17:
        name, args = cantor_unpair(p)
        raw = name.to_bytes((name.bit_length() + 7) // 8, "big")
        if not raw or not re.fullmatch(rb"[a-z][A-Za-z0-9_]*", raw):
            raise DecodeError(f"bad predicate name in {code}")
        return Pred(raw.decode(), tuple(_decode(a) for a in _dec_list(args)))
    raise DecodeError(f"{code} has unknown tag {tag}")


def godel_decode(code: int):
    if not isinstance(code, int) or code < 0:
        raise DecodeError(f"not a natural number: {code!r}")
    node = _decode(code)
    try:
        check_sorts(node)
    except SortError as exc:
        raise DecodeError(f"{code} decodes to an ill-sorted expression: {exc}") from None
    return node


def code_tag(code: int) -> str:
    """Constructor name at the top of a code, without decoding children."""
    tag, _ = cantor_unpair(code)
    for cls, t in _TAGS.items():
        if t == tag:
            return cls.__name__
    raise DecodeError(f"{code} has unknown tag {tag}")


def code_parts(code: int) -> tuple:
    """One-level view of a code: (constructor, fields) with subterm codes left coded."""
    tag, p = cantor_unpair(code)
    name = code_tag(code)
    if tag in (0, 8):
        return name, ()
    if tag == 1:
        return name, (p,)
    if tag == 2:
        return name, (_dec_var(p),)
    if tag == 3:
        return name, (p,)
    if tag in (4, 5, 12, 13, 14, 11):
        return name, cantor_unpair(p)
    if tag == 6:
        return name, cantor_unpair(p)
    if tag in (7, 9, 10):
        lv, ab = cantor_unpair(p)
        return name, (lv, *cantor_unpair(ab))
    if tag in (15, 16):
        v, b = cantor_unpair(p)
        return name, (_dec_var(v), b)
    if tag == 17:
        nm, args = cantor_unpair(p)
        return name, (nm, tuple(_dec_list(args)))
    raise DecodeError(f"{code} has unknown tag {tag}")
