from __future__ import annotations

import json

import pytest

from dialogues import rese_dialogue
from psaf.cli import EXIT_ERROR, EXIT_NO, EXIT_YES, main
from psaf.logic import load_kb

from conftest import kb_path

UNI = str(kb_path("university"))


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize("mode, expected", [("possible", EXIT_YES), ("plausible", EXIT_NO), ("surest", EXIT_NO)])
def test_query_modes(capsys, mode, expected):
    code, out, _ = run(capsys, "query", "--kb", UNI, "--query", "rese(v)", "--mode", mode)
    assert code == expected
    assert out.splitlines()[0] == ("yes" if expected == EXIT_YES else "no")


def test_query_surest_fact(capsys):
    code, out, _ = run(capsys, "query", "--kb", UNI, "--query", "gc(kr)", "--mode", "surest")
    assert code == EXIT_YES
    assert "I certainly believe that gc(kr)" in out


def test_query_json(capsys):
    code, out, _ = run(capsys, "query", "--kb", UNI, "--query", "rese(v)", "--format", "json")
    doc = json.loads(out.split("\n", 1)[1])
    assert code == EXIT_YES
    assert doc["dialogue"]["utterances"][0]["content"] == {"kind": "claim", "phi": "rese(v)"}
    assert doc["tree"]["formula"] == "rese(v)"


def test_query_writes_files(capsys, tmp_path):
    prefix = tmp_path / "rese"
    code, _, _ = run(capsys, "query", "--kb", UNI, "--query", "rese(v)", "--format", "dot", "--out", str(prefix))
    assert code == EXIT_YES
    assert (tmp_path / "rese.tree.dot").read_text().startswith("digraph")
    d = json.loads((tmp_path / "rese.dialogue.json").read_text())
    assert d["kb"] == UNI


@pytest.mark.parametrize(
    "argv",
    [
        ("query", "--kb", "missing.kb", "--query", "p(a)"),
        ("query", "--kb", UNI, "--query", "rese(X)"),
        ("arguments", "--kb", str(kb_path("cyclic"))),
    ],
)
def test_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == EXIT_ERROR and err.startswith("error:")


def test_extensions(capsys):
    code, out, _ = run(capsys, "extensions", "--kb", UNI, "--semantics", "stable")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "3 stable extension(s)"
    assert lines[1] == "E1: {a0, a1, a8, a12} concluding {gc(kr), ta(v), taOf(v,kd), uc(kd)}"


def test_extensions_json(capsys):
    _, out, _ = run(capsys, "extensions", "--kb", str(kb_path("k4")), "--format", "json")
    assert [len(e["arguments"]) for e in json.loads(out)] == [2, 2, 2]


def test_mcs(capsys):
    code, out, _ = run(capsys, "mcs", "--kb", UNI)
    assert code == 0
    assert out.splitlines() == [
        "3 maximal consistent subset(s)",
        "B1: {gc(kr), taOf(v,kd), uc(kd)}",
        "B2: {gc(kr), taOf(v,kd), te(v,kd), te(v,kr)}",
        "B3: {gc(kr), te(v,kd), te(v,kr), uc(kd)}",
    ]


def test_arguments_with_attacks(capsys):
    code, out, _ = run(capsys, "arguments", "--kb", str(kb_path("k4")), "--attacks")
    assert code == 0
    assert "3 argument(s)" in out and "6 minimal attack(s)" in out  # one per kind
    assert "{a1, a2} -> a0 (rebuttal)" in out


def test_arguments_json(capsys):
    _, out, _ = run(capsys, "arguments", "--kb", UNI, "--format", "json")
    assert len(json.loads(out)["arguments"]) == 13


def test_verify_fixture(capsys):
    code, out, _ = run(capsys, "verify", "--kb", UNI)
    assert code == 0 and "FAIL" not in out


def test_verify_json(capsys):
    code, out, _ = run(capsys, "verify", "--kb", str(kb_path("k4")), "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["answers"] == {"mismatches": []}


def test_verify_needs_input(capsys):
    with pytest.raises(SystemExit):
        main(["verify"])


def test_classify(capsys, tmp_path):
    kb = load_kb(kb_path("university"))
    path = tmp_path / "rese.json"
    path.write_text(rese_dialogue(kb).to_json())
    code, out, _ = run(capsys, "classify", "--kb", UNI, "--dialogue", str(path))
    assert code == 0
    assert out.strip() == "admissible-successful, preferred-successful, stable-successful"
