import json
import subprocess
import sys

import pytest

from bethforge import beth_engine, cli, model_bs
from bethforge.calculus import node, proof_to_text
from bethforge.syntax_core import Implies, Pred, is_neg, parse, walk, Or, Exists, Mem


@pytest.fixture(scope="module")
def files(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    p = Pred("p")
    good = node("imp_i", Implies(p, p), (), [node("hyp", p, [p])])
    bad = node("imp_i", Implies(p, Pred("q")), (), [node("hyp", p, [p])])
    (d / "good.proof").write_text(proof_to_text(good))
    (d / "bad.proof").write_text(proof_to_text(bad))
    (d / "garbled.proof").write_text("1: nonsense [[ |-\n")
    (d / "lem.frame").write_text(beth_engine.dump_frame(beth_engine.lem_fixture()))
    (d / "broken.frame").write_text("states a b\nroot a\nsucc a: b\ntrue a: p\n")
    params = model_bs.TruncationParams(1, 3, 2)
    (d / "k1.table").write_text(model_bs.dump_table(model_bs.universe(params).konst(1)))
    (d / "ti.corpus").write_text("0 = 0\nex X1_1. all x0. (x0 in0 X1_1 <-> x0 = 0)  # comprehension\n")
    return d


def scenarios(d):
    return [
        (["parse", "all x0. x0 = x0", "--language", "L", "--s", "0"], 0),
        (["parse", "all x0. (", "--language", "L"], 2),
        (["check-proof", str(d / "good.proof"), "--theory", "SLP"], 0),
        (["check-proof", str(d / "bad.proof"), "--theory", "SLP"], 1),
        (["check-proof", str(d / "garbled.proof")], 2),
        (["force", str(d / "lem.frame"), "p -> p"], 0),
        (["force", str(d / "lem.frame"), "p | ~p"], 1),
        (["force", str(d / "lem.frame"), "p", "--walk", "r.t"], 0),
        (["force", str(d / "broken.frame"), "p"], 2),
        (["force", str(d / "missing.frame"), "p"], 2),
        (["countermodel", "p | ~p", "--max-states", "2"], 1),
        (["countermodel", "p -> p", "--max-states", "3"], 0),
        (["bs", "enumerate", "--s", "1", "--depth", "2"], 0),
        (["bs", "enumerate", "--s", "3", "--depth", "3"], 2),
        (["bs", "extend-lawless", str(d / "k1.table"), "--s", "1", "--depth", "3", "--x", "1",
          "--gamma", "1,1,0"], 0),
        (["translate", "all z0. (z0 in0 X1_1 -> z0 = 0)", "--from", "TI", "--s", "1", "--pass", "int"], 0),
        (["eval", "all x0. x0 = 0", "--universe", "s=1,N=2"], 1),
        (["tr", "0 = 0", "--universe", "s=1,N=2"], 0),
        (["int-check", "--corpus", str(d / "ti.corpus"), "--universe", "s=1,N=2"], 0),
        (["demo", "lem"], 0),
    ]


def test_exit_code_matrix(files):
    rows = scenarios(files)
    assert len(rows) == 20
    for argv, want in rows:
        assert cli.run(argv).code == want, argv


def test_bad_subcommand_and_flags():
    assert cli.run([]).code == 2
    assert cli.run(["bogus"]).code == 2
    assert cli.run(["eval", "0 = 0", "--universe", "s=9"]).code == 2
    assert cli.run(["eval", "x0 = 0", "--universe", "s=1,N=2"]).code == 2


def test_demo_lem_text():
    out = cli.run(["demo", "lem"])
    assert "root does not force p | ~p" in out.text.replace("∨", "|")


def test_demo_mp_reports_all_three():
    out = cli.run(["demo", "mp", "--format", "json"])
    assert set(out.doc["verdicts"]) == {"MR1", "MR2", "MR3"}
    assert out.doc["verdicts"]["MR1"] is True and out.doc["verdicts"]["MR3"] is False
    assert out.code == (0 if out.doc["verdicts"] == out.doc["expected"] else 1)


def test_translate_output_is_negative(files):
    out = cli.run(["translate", "all z0. (z0 in0 X1_1 -> z0 = 0)", "--from", "TI", "--s", "1",
                   "--pass", "int", "--format", "json"])
    phi = parse(out.doc["formula"], "SLP", 1)
    assert not any(isinstance(n, (Or, Exists, Mem)) for n in walk(phi))


def test_formulas_round_trip(files):
    trace = cli.run(["translate", "ex X1_1. all x0. (x0 in0 X1_1 <-> x0 = 0)", "--s", "1", "--trace",
                     "--format", "json"])
    for entry in trace.doc["passes"]:
        lang = "TI" if entry["pass"] in ("input", "star") else "SLP"
        phi = parse(entry["formula"], lang, 1)
        assert parse(str(cli.show(phi)), lang, 1) == phi
    doc = cli.run(["parse", "all X1_1. ~~X1_1 =1 X1_1", "--language", "TI", "--format", "json"]).doc
    assert parse(doc["text"], "TI", 2) == parse("all X1_1. ~~X1_1 =1 X1_1", "TI", 2)
    doc = cli.run(["force", str(files / "lem.frame"), "~~p", "--format", "json"]).doc
    assert is_neg(parse(doc["formula"], "L", 2))
    doc = cli.run(["int-check", "--corpus", str(files / "ti.corpus"), "--universe", "s=1,N=2",
                   "--format", "json"]).doc
    assert all(parse(r["formula"], "TI", 1) for r in doc["rows"])
    doc = cli.run(["countermodel", "p | ~p", "--max-states", "2", "--format", "json"]).doc
    frame = beth_engine.load_frame(doc["countermodel"]["frame"])
    assert not beth_engine.force(frame, None, parse(doc["formula"], "L", 2))


def test_json_is_deterministic():
    a = cli.run(["bs", "enumerate", "--s", "1", "--depth", "2", "--format", "json"])
    b = cli.run(["bs", "enumerate", "--s", "1", "--depth", "2", "--format", "json"])
    assert json.dumps(a.doc) == json.dumps(b.doc)
    assert a.doc["levels"][1]["carrier"] == 1444


def test_console_script(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "bethforge.cli", "eval", "0 = 0", "--format", "json"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["value"] is True
    proc = subprocess.run([sys.executable, "-m", "bethforge.cli", "parse", "("], capture_output=True, text=True)
    assert proc.returncode == 2 and proc.stderr.startswith("error:")
