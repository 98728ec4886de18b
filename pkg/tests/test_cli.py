import json
import subprocess
import sys
from pathlib import Path

import jsonschema
import pytest

from randgen import FIXTURES

SCHEMAS = Path(__file__).resolve().parent.parent / "docs" / "schemas"
PERSON = FIXTURES / "person"
EMPLOYEE = FIXTURES / "employee"


def run(*args, env=None):
    return subprocess.run([sys.executable, "-m", "repairlab", *map(str, args)],
                          capture_output=True, text=True, env=env)


def bundle(d):
    return ["--schema", d / "schema.rl", "--constraints", d / "constraints.rl", "--data", d / "data"]


def as_json(schema_name, *args):
    p = run(*args, "--format", "json")
    assert p.returncode == 0, p.stderr
    doc = json.loads(p.stdout)
    jsonschema.validate(doc, json.loads((SCHEMAS / f"{schema_name}.schema.json").read_text()))
    return doc


def test_check_accepts_repair():
    doc = as_json("check", "check", *bundle(PERSON), "--candidate", PERSON / "repair1")
    assert doc["ok"] is True and doc["certificate"] is None
    assert doc["engine"] == "denial"


def test_check_rejects_green_only():
    doc = as_json("check", "check", *bundle(PERSON), "--candidate", PERSON / "green")
    assert doc["ok"] is False
    assert doc["certificate"]["kind"] == "addable"
    assert doc["certificate"]["facts"] == ["Person('Brown', 'Amherst', '115 Klein')"]


def test_check_text_output():
    p = run("check", *bundle(PERSON), "--candidate", PERSON / "green")
    assert p.returncode == 0
    assert "not a repair" in p.stdout and "115 Klein" in p.stdout


def test_missing_candidate_is_usage_error():
    assert run("check", *bundle(PERSON)).returncode == 2


def test_unsupported_class_exit_code():
    p = run("cqa", *bundle(EMPLOYEE), "--query", EMPLOYEE / "q_smith.rl")
    assert p.returncode == 3
    assert "unsupported" in p.stderr


def test_oracle_engine_answers_unsupported_class():
    doc = as_json("cqa-closed", "cqa", *bundle(EMPLOYEE), "--query", EMPLOYEE / "q_smith.rl", "--engine", "oracle")
    assert doc["consistent"] is False and doc["engine"] == "oracle"


def test_io_errors_exit_4(tmp_path):
    assert run("cqa", *bundle(PERSON), "--query", tmp_path / "missing.rl").returncode == 4
    bad = tmp_path / "bad.rl"
    bad.write_text("exists x: Nope(x\n")
    assert run("cqa", *bundle(PERSON), "--query", bad).returncode == 4


def test_person_queries():
    disj = as_json("cqa-closed", "cqa", *bundle(PERSON), "--query", PERSON / "q_disj.rl")
    assert disj["consistent"] is True
    full = as_json("cqa-open", "cqa", *bundle(PERSON), "--query", PERSON / "q_full.rl")
    assert full["answers"] == [["Green", "Clarence", "4000 Transit"]]
    assert full["free"] == ["n", "c", "s"]
    proj = as_json("cqa-open", "cqa", *bundle(PERSON), "--query", PERSON / "q_proj.rl")
    assert proj["answers"] == [["Brown", "Amherst"], ["Green", "Clarence"]]


def test_enumerate_person():
    doc = as_json("repairs", "repairs", *bundle(PERSON), "--mode", "enumerate")
    assert doc["count"] == 2 and doc["exhaustive"] is True


def test_sample_is_deterministic():
    a = as_json("repairs", "repairs", *bundle(PERSON), "--mode", "sample", "--seed", "3")
    b = as_json("repairs", "repairs", *bundle(PERSON), "--mode", "sample", "--seed", "3")
    assert a == b and a["seed"] == 3
    assert len(a["repair"]["Person"]) == 2


def test_hypergraph_and_classify():
    hg = as_json("hypergraph", "hypergraph", *bundle(PERSON))
    assert len(hg["vertices"]) == 3 and hg["edges"] == [[0, 1]]
    dot = run("hypergraph", *bundle(PERSON), "--format", "dot")
    assert dot.returncode == 0 and dot.stdout.lstrip().startswith("graph")
    cl = as_json("classify", "classify", *bundle(PERSON))
    assert cl["classification"] == "fds-only"
    assert as_json("classify", "classify", *bundle(EMPLOYEE))["classification"] == "acyclic-fd-ind"


def test_generate_then_enumerate(tmp_path):
    doc = as_json("generate", "generate", "exponential", "n=3", "--out-dir", tmp_path)
    assert doc["facts"] == 6
    rows = (tmp_path / "data" / "R.csv").read_text().strip().splitlines()
    assert len(rows) == 7
    rep = as_json("repairs", "repairs", *bundle(tmp_path), "--mode", "enumerate")
    assert rep["count"] == 8


def test_generate_reduction_bundle(tmp_path):
    doc = as_json("generate", "generate", "monotone3sat", "cnf=1 2; -1 -2", "--out-dir", tmp_path)
    assert doc["classification"] == "fds-only"
    assert "query.rl" in " ".join(doc["files"])


@pytest.mark.parametrize("cmd", [
    ["cqa", "--query", PERSON / "q_proj.rl"],
    ["repairs", "--mode", "enumerate"],
    ["hypergraph"],
    ["check", "--candidate", PERSON / "green"],
])
def test_json_output_is_byte_identical(cmd):
    outs = {run(cmd[0], *bundle(PERSON), *cmd[1:], "--format", "json").stdout for _ in range(3)}
    assert len(outs) == 1
