import csv
import io
import json
import math

import pytest

from qfasim.automaton_file import save_automaton
from qfasim.cli import EXIT_EQUAL, EXIT_ERROR, EXIT_INEQUAL, cmd_run, main
from qfasim.classical import AcceptanceMode
from qfasim.oneway import build_modp_2state
from qfasim.report import ExperimentReport
from qfasim.twoway import build_eq_15kwqfa


@pytest.fixture
def mod5(tmp_path):
    paths = {}
    for k in (1, 2, 4):
        paths[k] = tmp_path / f"mod5_k{k}.json"
        save_automaton(build_modp_2state(5, k), paths[k])
    return paths


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    return code, capsys.readouterr()


def test_classify_mod5_members(mod5, capsys):
    bound = math.cos(math.pi / 5) ** 2
    words = ["a" * j for j in range(11)]
    code, out = run(capsys, "classify", mod5[1], *words, "--mode", f"negative:{bound!r}", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out.out)))
    members = [len(r["word"]) for r in rows if r["decision"] == "member"]
    assert members == [0, 5, 10]


def test_run_two_way_values():
    rep = cmd_run(build_eq_15kwqfa(), ["ab", "aab"])
    assert [round(r[1], 12) for r in rep.rows] == [1, 0.5]
    assert "residual" in rep.columns and "steps" in rep.columns


def test_empty_word_list():
    rep = cmd_run(build_modp_2state(5), [], AcceptanceMode.parse("positive"))
    assert rep.rows == []


def test_equiv_exit_codes(mod5, capsys):
    code, out = run(capsys, "equiv", mod5[1], mod5[1])
    assert code == EXIT_EQUAL and "equal" in out.out
    code, out = run(capsys, "equiv", mod5[1], mod5[4])
    assert code == EXIT_EQUAL and "exact" in out.out
    code, out = run(capsys, "equiv", mod5[1], mod5[2], "--format", "json")
    assert code == EXIT_INEQUAL
    row = json.loads(out.out)["rows"][0]
    assert row["witness"] == "a"
    assert row["value_a"] == pytest.approx(math.cos(2 * math.pi / 5) ** 2, abs=1e-11)
    code, out = run(capsys, "equiv", mod5[1], "missing.json")
    assert code == EXIT_ERROR and "error" in out.err


def test_alphabet_error_exit(mod5, capsys):
    code, out = run(capsys, "run", mod5[1], "ab")
    assert code == EXIT_ERROR and "'b'" in out.err


def test_csv_and_json_agree(mod5, capsys):
    _, c = run(capsys, "run", mod5[2], "--max-len", "6", "--format", "csv")
    _, j = run(capsys, "run", mod5[2], "--max-len", "6", "--format", "json")
    csv_vals = [float(r["value"]) for r in csv.DictReader(io.StringIO(c.out))]
    json_vals = [r["value"] for r in json.loads(j.out)["rows"]]
    assert csv_vals == json_vals
    assert all(f"{v:.12g}" == f"{w:.12g}" for v, w in zip(csv_vals, json_vals))


def test_demo_modp_log(capsys):
    code, out = run(capsys, "demo", "modp-log", "--p", 31, "--eps", 0.25, "--seed", 7, "--format", "json")
    assert code == 0
    doc = json.loads(out.out)
    assert len(doc["rows"]) == 31
    assert doc["notes"]["max_nonmember_accept"] <= 0.25
    assert doc["notes"]["redraws"] == 0


def test_demo_pal_and_eq(capsys):
    _, out = run(capsys, "demo", "pal-2qcfa", "--word", "aba", "--format", "json")
    assert json.loads(out.out)["rows"][0]["phase_reject"] == 0
    _, out = run(capsys, "demo", "eq-2qcfa", "--word", "ab", "--trials", 20, "--format", "json")
    row = json.loads(out.out)["rows"][0]
    assert row["accept"] == 1 and row["mc_accept"] == 1


def test_demo_export_reproduces(tmp_path, capsys):
    path = tmp_path / "eq15.json"
    run(capsys, "demo", "eq-15kwqfa", "--export", path)
    code, out = run(capsys, "run", path, "ab", "aab", "--format", "json")
    assert code == 0
    assert [r["value"] for r in json.loads(out.out)["rows"]] == [1.0, 0.5]


def test_unknown_demo(capsys):
    with pytest.raises(SystemExit):
        main(["demo", "nope"])


def test_global_flags_before_command(mod5, capsys):
    code, out = run(capsys, "--format", "csv", "run", mod5[1], "a")
    assert code == 0 and out.out.startswith("word,value")


def test_report_table_alignment():
    rep = ExperimentReport(["word", "value"], title="t")
    rep.add("a", 0.5)
    rep.add("abc", 1 / 3)
    lines = rep.render("table").splitlines()
    assert lines[0] == "t"
    assert lines[-1].endswith("0.333333333333")
    with pytest.raises(ValueError):
        rep.render("xml")
