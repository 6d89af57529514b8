"""beth-forge: command-line front end.

Every subcommand builds a document (a dict) and renders it either as plain
text or, with --format json, as JSON.  Exit codes: 0 success or verified,
1 property refuted, 2 usage or input error.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path

from . import beth_engine, calculus, classical_eval, model_bs, translate
from .bs_suites import SUITES, run_suites
from .corpus import ti_corpus
from .syntax_core import (
    BethForgeError, LANGUAGES, SortedVar, Var, free_vars, godel_encode, max_level, parse, show,
)

OK, REFUTED, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- small readers

def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _split_top(text: str, sep: str = ",") -> list[str]:
    """Split on sep outside braces."""
    out, depth, cur = [], 0, []
    for ch in text:
        if ch == "{":
            depth += 1
        elif ch == "}":
            depth -= 1
            if depth < 0:
                raise UsageError(f"unbalanced braces in {text!r}")
        if ch == sep and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if depth:
        raise UsageError(f"unbalanced braces in {text!r}")
    out.append("".join(cur))
    return [p.strip() for p in out if p.strip()]


def read_value(text: str):
    """An int, a token, or a nested set literal such as {{0},{}}."""
    text = text.strip()
    if text.startswith("{"):
        if not text.endswith("}"):
            raise UsageError(f"bad set literal {text!r}")
        return frozenset(read_value(p) for p in _split_top(text[1:-1]))
    if text.isdigit():
        return int(text)
    if text.isidentifier():
        return text
    raise UsageError(f"cannot read value {text!r}")


def _read_var(name: str, language: str, s: int) -> SortedVar:
    try:
        e = parse(name, language, max(s, 1), kind="expr")
    except BethForgeError:
        e = None
    if not isinstance(e, Var):
        raise UsageError(f"{name!r} is not a variable")
    return e.var


def read_assign(text: str | None, language: str, s: int) -> dict:
    env = {}
    for item in _split_top(text or ""):
        name, eq, val = item.partition("=")
        if not eq:
            raise UsageError(f"assignment {item!r} needs name=value")
        env[_read_var(name.strip(), language, s)] = read_value(val)
    return env


def read_universe(text: str) -> tuple[int, int]:
    vals = {}
    for item in _split_top(text):
        k, _, v = item.partition("=")
        if k.strip() not in ("s", "N") or not v.strip().isdigit():
            raise UsageError(f"bad universe field {item!r}; expected s=<n>,N=<n>")
        vals[k.strip()] = int(v)
    if set(vals) != {"s", "N"}:
        raise UsageError("universe needs both s and N")
    return vals["s"], vals["N"]


def _check_env(U: classical_eval.TypedUniverse, env: dict) -> None:
    for v, x in env.items():
        if x not in U.carrier(v.level):
            raise UsageError(f"value for {v} is not in the level-{v.level} carrier")


def _params(args) -> model_bs.TruncationParams:
    try:
        return model_bs.TruncationParams(args.s, args.depth, args.base)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


# ---------------------------------------------------------------- commands

def cmd_parse(args):
    kind = "expr" if args.expr else "formula"
    node = parse(args.formula, args.language, args.s, kind=kind)
    doc = {"command": "parse", "language": args.language, "s": args.s, "text": show(node),
           "level": max_level(node), "free": sorted(str(v) for v in free_vars(node)),
           "code": str(godel_encode(node))}
    return OK, doc, show(node)


def cmd_check_proof(args):
    text = _read_text(args.file)
    try:
        theory = calculus.Theory(args.theory, args.s)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    try:
        proof = calculus.parse_proof(text, theory.language, args.s)
    except calculus.RuleError as exc:
        raise UsageError(str(exc)) from None
    doc = {"command": "check-proof", "theory": str(theory), "nodes": proof.size}
    try:
        checked = calculus.check_proof(proof, theory, True if args.classical else None)
    except (calculus.RuleError, calculus.SideConditionError) as exc:
        doc.update(valid=False, error=str(exc))
        return REFUTED, doc, f"invalid: {exc}"
    sequent = "; ".join(show(a) for a in checked.assumptions) + " |- " + show(checked.conclusion)
    doc.update(valid=True, sequent=sequent.strip())
    return OK, doc, f"valid: {sequent.strip()}"


def _walk(frame, text):
    if not text:
        return None
    states = tuple(text.split("."))
    for s in states:
        if s not in frame.states:
            raise UsageError(f"unknown state {s!r} in walk")
    if states[0] != frame.root:
        raise UsageError("a walk starts at the root")
    for a, b in zip(states, states[1:]):
        if b not in frame.succ.get(a, ()):
            raise UsageError(f"{b} is not a successor of {a}")
    return states


def cmd_force(args):
    frame = beth_engine.load_frame(_read_text(args.frame))
    problems = beth_engine.validate_frame(frame)
    if problems:
        raise UsageError("; ".join(problems))
    phi = parse(args.formula, args.language, args.s)
    env = read_assign(args.assign, args.language, args.s)
    walk = _walk(frame, args.walk)
    forced = beth_engine.force(frame, walk, phi, env)
    at = ".".join(walk) if walk else frame.root
    doc = {"command": "force", "formula": show(phi), "walk": at, "forced": forced}
    return (OK if forced else REFUTED), doc, f"{at} {'forces' if forced else 'does not force'} {show(phi)}"


def cmd_countermodel(args):
    phi = parse(args.formula, args.language, args.s)
    found = beth_engine.countermodel_search(phi, args.max_states, args.max_carrier)
    doc = {"command": "countermodel", "formula": show(phi), "max_states": args.max_states}
    if found is None:
        doc["countermodel"] = None
        return OK, doc, f"no countermodel with at most {args.max_states} states"
    frame, walk = found
    doc["countermodel"] = {"frame": beth_engine.dump_frame(frame), "walk": ".".join(walk)}
    return REFUTED, doc, f"refuted at {'.'.join(walk)}:\n{beth_engine.dump_frame(frame)}".rstrip()


def cmd_bs_enumerate(args):
    params = _params(args)
    try:
        model_bs.guard(params)
    except model_bs.BlowupError as exc:
        raise UsageError(str(exc)) from None
    levels = [args.level] if args.level is not None else list(range(params.s + 1))
    rows = []
    for k in levels:
        if not 0 <= k <= params.s:
            raise UsageError(f"level {k} outside 0..{params.s}")
        try:
            d = model_bs.enumerate_domain(params, k)
            rows.append({"level": k, "carrier": len(d.carrier), "lawlike": len(d.lawlike),
                         "lawless": len(d.lawless), "nodes": len(d.nodes) if k < params.s else None})
        except model_bs.BlowupError as exc:
            rows.append({"level": k, "error": str(exc)})
    doc = {"command": "bs enumerate", "s": params.s, "depth": params.depth, "base": params.base,
           "levels": rows}
    lines = []
    for r in rows:
        if "error" in r:
            lines.append(f"a_{r['level']}: too large ({r['error']})")
        else:
            nodes = f", d_{r['level']}: {r['nodes']} nodes" if r["nodes"] is not None else ""
            lines.append(f"a_{r['level']}: {r['carrier']} (lawlike {r['lawlike']}, lawless {r['lawless']}){nodes}")
    return OK, doc, "\n".join(lines)


def cmd_bs_lemmas(args):
    params = _params(args)
    names = args.suite or list(SUITES)
    for n in names:
        if n not in SUITES:
            raise UsageError(f"unknown suite {n!r}; choose from {', '.join(SUITES)}")
    t = time.perf_counter()
    results = run_suites(params, names)
    doc = {"command": "bs lemmas", "s": params.s, "depth": params.depth, "base": params.base,
           "seconds": round(time.perf_counter() - t, 2),
           "suites": [{"name": r.name, "checked": r.checked, "failed": r.failed, "failures": r.failures}
                      for r in results]}
    lines = [r.line() for r in results]
    for r in results:
        lines += [f"  {f}" for f in r.failures]
    return (OK if all(r.ok for r in results) else REFUTED), doc, "\n".join(lines)


def cmd_bs_extend(args):
    params = _params(args)
    f = model_bs.load_table(params, _read_text(args.table))
    gamma = model_bs.parse_node(params, args.gamma, width=len(args.gamma.split("/")))
    if gamma.width < params.s:
        gamma = model_bs.extension(params, gamma, gamma.width)
    h = model_bs.lawless_extend(params, f, args.x, gamma).renamed("extended")
    kind = model_bs.classify(params, h)
    doc = {"command": "bs extend-lawless", "x": args.x, "gamma": str(gamma), "kind": kind.value,
           "table": model_bs.dump_table(h)}
    return OK, doc, f"# {kind.value}\n{model_bs.dump_table(h)}".rstrip()


PASSES = ("input", "star", "prime", "int")


def cmd_translate(args):
    if args.source != "TI":
        raise UsageError("only the set language TI can be translated")
    phi = parse(args.formula, "TI", args.s)
    trace = translate.interpret(phi, close=args.close)
    entries = trace.to_document()
    doc = {"command": "translate", "s": args.s, "definitions": list(trace.definitions)}
    if args.trace:
        doc["passes"] = entries
        text = "\n".join(f"{e['pass']}: {e['formula']}" for e in entries)
    else:
        picked = {"neg": "int"}.get(args.pass_, args.pass_)
        formula = next(e["formula"] for e in entries if e["pass"] == picked)
        doc.update({"pass": args.pass_, "formula": formula})
        text = formula
    return OK, doc, text


def _universe(args):
    s, N = read_universe(args.universe)
    try:
        return classical_eval.TypedUniverse(s, N)
    except (ValueError, classical_eval.CapacityError) as exc:
        raise UsageError(str(exc)) from None


def cmd_eval(args):
    U = _universe(args)
    phi = parse(args.formula, "TI", U.s)
    env = read_assign(args.assign, "TI", U.s)
    _check_env(U, env)
    missing = free_vars(phi) - set(env)
    if missing:
        raise UsageError(f"no value for {', '.join(sorted(map(str, missing)))}")
    val = classical_eval.eval_ti(U, phi, env)
    doc = {"command": "eval", "formula": show(phi), "universe": {"s": U.s, "N": U.N}, "value": val}
    return (OK if val else REFUTED), doc, "true" if val else "false"


def cmd_tr(args):
    U = _universe(args)
    text = args.code.strip()
    if text.isdigit():
        code = int(text)
    else:
        code = godel_encode(parse(text, "TI", U.s))
    env = read_assign(args.assign, "TI", U.s)
    _check_env(U, env)
    val = classical_eval.tr(U, code, env)
    doc = {"command": "tr", "code": str(code), "universe": {"s": U.s, "N": U.N}, "value": val}
    return (OK if val else REFUTED), doc, "true" if val else "false"


def cmd_int_check(args):
    s, N = read_universe(args.universe)
    if args.corpus:
        lines = [ln.split("#", 1)[0].strip() for ln in _read_text(args.corpus).splitlines()]
        formulas = [parse(ln, "TI", s) for ln in lines if ln]
    else:
        formulas = ti_corpus(args.seed, args.generate, s, args.max_depth)
    U = classical_eval.TypedUniverse.for_translation(s, N)
    W = classical_eval.FunctionalUniverse.image_of(U)
    rows = []
    for phi in formulas:
        if free_vars(phi):
            raise UsageError(f"not closed: {show(phi)}")
        trace = translate.interpret(phi)
        truth = classical_eval.eval_ti(U, phi)
        row = {"formula": show(phi), "ti": truth,
               "star": classical_eval.eval_ti(U, trace.star) == truth,
               "neg": classical_eval.eval_slp(W, trace.prime) == classical_eval.eval_slp(W, trace.int),
               "int": classical_eval.eval_slp(W, trace.int) == truth}
        rows.append(row)
    bad = [r for r in rows if not (r["star"] and r["neg"] and r["int"])]
    doc = {"command": "int-check", "universe": {"s": s, "N": N}, "count": len(rows),
           "failures": len(bad), "rows": rows}
    mark = {True: "ok", False: "FAIL"}
    lines = [f"{'T' if r['ti'] else 'F'}  star {mark[r['star']]:4} neg {mark[r['neg']]:4} "
             f"int {mark[r['int']]:4} {r['formula']}" for r in rows]
    lines.append(f"{len(rows) - len(bad)}/{len(rows)} agree")
    return (OK if not bad else REFUTED), doc, "\n".join(lines)


MP_EXPECTED = {"MR1": True, "MR2": True, "MR3": False}


def cmd_demo(args):
    if args.which == "lem":
        frame = beth_engine.lem_fixture()
        phi = parse("p | ~p", "L", 1)
        dn = parse("~~(p | ~p)", "L", 1)
        forced, forced_dn = beth_engine.force(frame, None, phi), beth_engine.force(frame, None, dn)
        doc = {"command": "demo lem", "frame": beth_engine.dump_frame(frame),
               "verdicts": {show(phi): forced, show(dn): forced_dn}}
        text = (beth_engine.dump_frame(frame)
                + f"root {'forces' if forced else 'does not force'} {show(phi)}\n"
                + f"root {'forces' if forced_dn else 'does not force'} {show(dn)}")
        return (OK if not forced and forced_dn else REFUTED), doc, text
    frame = beth_engine.mp_fixture(args.horizon)
    got = {k: beth_engine.force(frame, None, f, beth_engine.mp_env()) for k, f in beth_engine.mp_formulas().items()}
    doc = {"command": "demo mp", "frame": beth_engine.dump_frame(frame), "horizon": args.horizon,
           "formulas": {k: show(f) for k, f in beth_engine.mp_formulas().items()},
           "verdicts": got, "expected": MP_EXPECTED}
    lines = [beth_engine.dump_frame(frame).rstrip()]
    for k, f in beth_engine.mp_formulas().items():
        status = "as expected" if got[k] == MP_EXPECTED[k] else f"expected {'forced' if MP_EXPECTED[k] else 'not forced'}"
        lines.append(f"{k}: {'forced' if got[k] else 'not forced'} ({status})  {show(f)}")
    return (OK if got == MP_EXPECTED else REFUTED), doc, "\n".join(lines)


# ---------------------------------------------------------------- argument parsing

def _globals(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--s", type=int, default=d(2), help="type level (default 2)")
    p.add_argument("--format", choices=("text", "json"), default=d("text"))
    p.add_argument("--seed", type=int, default=d(0), help="seed for generated corpora")
    p.add_argument("--max-states", type=int, default=d(4))
    p.add_argument("--depth", type=int, default=d(2), help="truncation depth D")
    p.add_argument("--base", type=int, default=d(2), help="numeric branching B")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="beth-forge", description=__doc__.splitlines()[0])
    _globals(ap, False)
    common = argparse.ArgumentParser(add_help=False)
    _globals(common, True)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", parents=[common], help="parse and normalise a formula")
    p.add_argument("formula")
    p.add_argument("--language", choices=LANGUAGES, default="SLP")
    p.add_argument("--expr", action="store_true", help="parse an expression instead")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("check-proof", parents=[common], help="check a proof file")
    p.add_argument("file")
    p.add_argument("--theory", default="SLP", choices=calculus.THEORIES)
    p.add_argument("--classical", action="store_true")
    p.set_defaults(func=cmd_check_proof)

    p = sub.add_parser("force", parents=[common], help="bar forcing on a frame file")
    p.add_argument("frame")
    p.add_argument("formula")
    p.add_argument("--walk", help="dot-separated states from the root, e.g. r.r.t")
    p.add_argument("--language", choices=LANGUAGES, default="L")
    p.add_argument("--assign")
    p.set_defaults(func=cmd_force)

    p = sub.add_parser("countermodel", parents=[common], help="search for a refuting frame")
    p.add_argument("formula")
    p.add_argument("--language", choices=LANGUAGES, default="L")
    p.add_argument("--max-carrier", type=int, default=1)
    p.set_defaults(func=cmd_countermodel)

    bs = sub.add_parser("bs", help="the truncated functional model")
    bsub = bs.add_subparsers(dest="bs_command", required=True)
    p = bsub.add_parser("enumerate", parents=[common])
    p.add_argument("--level", type=int)
    p.set_defaults(func=cmd_bs_enumerate)
    p = bsub.add_parser("lemmas", parents=[common])
    p.add_argument("--suite", action="append", help=f"one of {', '.join(SUITES)} (repeatable)")
    p.set_defaults(func=cmd_bs_lemmas)
    p = bsub.add_parser("extend-lawless", parents=[common])
    p.add_argument("table")
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--gamma", required=True, help="node such as 0,1/K1,L1_2")
    p.set_defaults(func=cmd_bs_extend)

    p = sub.add_parser("translate", parents=[common], help="interpret a set formula functionally")
    p.add_argument("formula")
    p.add_argument("--from", dest="source", default="TI")
    p.add_argument("--pass", dest="pass_", choices=("star", "prime", "neg", "int"), default="int")
    p.add_argument("--trace", action="store_true")
    p.add_argument("--close", action="store_true", help="translate the universal closure")
    p.set_defaults(func=cmd_translate)

    p = sub.add_parser("eval", parents=[common], help="classical truth in a finite type structure")
    p.add_argument("formula")
    p.add_argument("--universe", default="s=2,N=2")
    p.add_argument("--assign")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("tr", parents=[common], help="truth by recursion on a code")
    p.add_argument("code", help="a code number, or a formula to encode")
    p.add_argument("--universe", default="s=2,N=2")
    p.add_argument("--assign")
    p.set_defaults(func=cmd_tr)

    p = sub.add_parser("int-check", parents=[common], help="semantic check of the interpretation")
    p.add_argument("--corpus")
    p.add_argument("--generate", type=int, default=50)
    p.add_argument("--max-depth", type=int, default=4)
    p.add_argument("--universe", default="s=2,N=2")
    p.set_defaults(func=cmd_int_check)

    p = sub.add_parser("demo", parents=[common], help="built-in fixtures")
    p.add_argument("which", choices=("mp", "lem"))
    p.add_argument("--horizon", type=int, default=7)
    p.set_defaults(func=cmd_demo)
    return ap


@dataclass(frozen=True)
class Outcome:
    code: int
    doc: dict | None
    text: str
    format: str = "text"


def run(argv) -> Outcome:
    """Parse argv and dispatch."""
    if hasattr(sys, "set_int_max_str_digits"):
        sys.set_int_max_str_digits(0)  # code numbers get long
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return Outcome(int(exc.code or 0), None, "")
    try:
        code, doc, text = args.func(args)
    except (UsageError, BethForgeError, ValueError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else str(exc)
        code, doc, text = USAGE, {"command": args.command, "error": msg}, f"error: {msg}"
    return Outcome(code, doc, text, args.format)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    res = run(argv)
    if res.doc is None:
        return res.code
    out = sys.stderr if res.code == USAGE else sys.stdout
    if res.format == "json":
        print(json.dumps({"exit": res.code, **res.doc}, indent=2), file=out)
    else:
        print(res.text, file=out)
    return res.code


if __name__ == "__main__":
    sys.exit(main())
