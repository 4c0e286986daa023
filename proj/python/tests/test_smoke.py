import json
import os
from pathlib import Path

import pytest

import pymbt

ROOT = Path(os.environ.get("MBT_SOURCE_DIR", Path(__file__).resolve().parents[2]))
QUIZUP = ROOT / "models" / "quizup"

DOOR = """
model Door {
  var opens: int = 0;
  state v_Closed start;
  state v_Open;
  trans e_Open: v_Closed -> v_Open do "opens = opens + 1";
  trans e_Close: v_Open -> v_Closed;
}
"""


@pytest.fixture(scope="module")
def quizup():
    return pymbt.load_model(str(QUIZUP))


def test_expressions():
    assert pymbt.parse_expr("a&&b||!c") == "((a && b) || !c)"
    assert pymbt.evaluate("n + 2 > 3", {"n": 2}) is True
    assert pymbt.evaluate("emailType == 'VALID' && passwordType == 'VALID'",
                          {"emailType": "VALID", "passwordType": "INVALID"}) is False
    with pytest.raises(pymbt.MbtError):
        pymbt.parse_expr("a && ")


def test_reference_model(quizup):
    assert len(quizup.states) == 23
    assert len(quizup.transitions) == 91
    assert quizup.validate() == []
    assert len(quizup.content_hash) == 64
    assert "EmailLogin.v_LoginUnknownUser" in quizup.labels()


def test_generate_is_deterministic_and_covering(quizup):
    a = pymbt.generate(quizup, 7)
    b = pymbt.generate(quizup, 7)
    assert a["tests"] == b["tests"]
    assert len(a["tests"]) == 100
    assert a["coverage"]["state_percent"] == 100.0
    assert a["coverage"]["transition_percent"] == 100.0
    again = pymbt.measure_coverage(a["tests"], quizup)
    assert again == a["coverage"]


def test_small_dsl_model():
    door = pymbt.parse_dsl(DOOR)
    suite = pymbt.generate(door, 3, "transitions(100)", max_steps=4)
    steps = suite["tests"][0]["steps"]
    assert steps[0]["label"] == "v_Closed"
    assert all(t["steps"][-1]["label"] in ("v_Closed", "v_Open") for t in suite["tests"])


def test_end_to_end_with_a_fault(quizup):
    suite = pymbt.generate(quizup, 7)
    table = (QUIZUP / "mapping.json").read_text()
    concrete = pymbt.instantiate(suite["tests"], quizup, table)
    base = {"baseState": "Welcome", "qtdsPath": str(QUIZUP / "qtds.json")}
    clean = pymbt.run_reference(concrete, dict(base, faults=[]))
    assert clean["summary"] == {"total": 100, "passed": 100, "failed": 0, "errored": 0}
    faulty = pymbt.run_reference(concrete, dict(base, faults=["WRONG_HEADER"]), jobs=2)
    assert faulty["summary"]["failed"] > 0
    failing = [t for t in faulty["tests"] if t["verdict"] == "failed"]
    assert any("header" in t["diff"] for t in failing)


def test_cli(tmp_path):
    code, out, _ = pymbt.run_cli(["validate", str(QUIZUP)])
    assert code == 0 and out.startswith("ok:")
    code, _, err = pymbt.run_cli(["generate", str(QUIZUP), "--seed", "1", "--out", "x", "--bogus"])
    assert code == 2 and "--bogus" in err
    suite = tmp_path / "s.jsonl"
    code, _, _ = pymbt.run_cli(["generate", str(QUIZUP), "--seed", "1", "--out", str(suite)])
    assert code == 0
    first = json.loads(suite.read_text().splitlines()[0])
    assert list(first) == ["id", "seed", "steps"]
