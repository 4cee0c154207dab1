from __future__ import annotations

import json
from pathlib import Path

import pytest

from sprshift.cli import main
from sprshift.graph import DirectedMultigraph, full_shift, golden_mean

INPUTS = {
    "gm": golden_mean().to_json(),
    "two": full_shift(2).to_json(),
    "p2": DirectedMultigraph.from_edges([("a", 0, 1), ("b", 0, 1), ("c", 1, 0), ("d", 1, 0)]).to_json(),
    "red": DirectedMultigraph.from_edges([("a", 0, 0), ("b", 0, 1), ("c", 1, 1)]).to_json(),
    "f2z": {"type": "polynomial", "coeffs": [2]},
    "zz2": {"type": "polynomial", "coeffs": [1, 1]},
    "ones": {"type": "eventually_geometric", "prefix": [], "c": "1", "b": "1", "n0": 0},
}


@pytest.fixture()
def files(tmp_path: Path) -> dict[str, str]:
    out = {}
    for name, data in INPUTS.items():
        p = tmp_path / f"{name}.json"
        p.write_text(json.dumps(data))
        out[name] = str(p)
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    out["bad"] = str(bad)
    return out


def run(capsys, *argv) -> tuple[int, dict, str]:
    code = main(list(argv))
    text = capsys.readouterr().out
    return code, json.loads(text), text


def test_classify(files, capsys):
    code, rep, _ = run(capsys, "classify", "-i", files["gm"])
    assert code == 0 and rep["exit_code"] == 0
    assert rep["result"]["entropy"]["lambda_poly"] == [-1, -1, 1]
    code, rep, _ = run(capsys, "classify", "-i", files["ones"])
    assert code == 0 and rep["result"]["spr"] is True


def test_parse_errors(files, capsys):
    code, rep, _ = run(capsys, "classify", "-i", files["bad"])
    assert code == 2 and rep["error"]["kind"] == "parse"
    assert main(["classify", "-i", files["gm"], "--tol", "-1/3"]) == 2
    assert main(["classify", "-i", files["gm"], "--tol", "abc"]) == 2


def test_embed_and_failures(files, capsys):
    code, rep, _ = run(capsys, "embed", "-i", files["zz2"], "--lambda-target", "2")
    assert code == 0 and rep["result"]["plan"]["rouche"]["holds"]
    code, rep, _ = run(capsys, "embed", "-i", files["f2z"], "--lambda-target", "2")
    assert code == 3 and "gap too small" in rep["error"]["message"]


def test_iso(files, capsys):
    code, rep, _ = run(capsys, "iso", "-a", files["two"], "-b", files["ones"])
    assert code == 0
    assert rep["result"]["free_part_isomorphism"]["conclusion"] == "yes"
    assert rep["result"]["borel_conjugacy"]["conclusion"] == "no"
    code, rep, _ = run(capsys, "iso", "-a", files["red"], "-b", files["two"])
    assert code == 4 and rep["error"]["kind"] == "theorem_hypotheses"


def test_verify_and_fault(capsys):
    code, rep, _ = run(capsys, "verify", "--seed", "3")
    assert code == 0 and rep["result"]["passed"]
    code, rep, _ = run(capsys, "verify", "--inject-fault")
    assert code == 5 and rep["result"]["first_counterexample"]["suite"] == "census"


def test_reports_are_byte_identical(files, capsys, tmp_path):
    for argv in (
        ["classify", "-i", files["gm"]],
        ["embed", "-i", files["zz2"], "--lambda-target", "2"],
        ["iso", "-a", files["two"], "-b", files["ones"]],
    ):
        first = run(capsys, *argv)[2]
        assert run(capsys, *argv)[2] == first
    out = tmp_path / "r.json"
    main(["classify", "-i", files["two"], "--out", str(out)])
    assert json.loads(out.read_text())["command"] == "classify"
