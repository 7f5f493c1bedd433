import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

SRC = Path(__file__).resolve().parent.parent / "src"

ORCA = """\
0.8 :: label(i1, whale).
0.7 :: polar(i1).
orca(X) :- label(X, whale), polar(X).
"""

KEY_PERSON = """\
0.8 :: kp(amy, acme).
1 :: company(acme).
kp(Y, X) :- company(X).
"""

NULLS = """\
0.8 :: s(a).
0.2 :: t(a).
p(X, Y) :- s(X).
t(X) :- p(X, Y).
"""

INCONSISTENT = """\
1 :: r(a).
0.5 :: s(a).
s(X) :- r(X).
"""

SELF_FEEDING = """\
p(a).
p(Y) :- p(X).
"""


def run_cli(*argv):
    env = dict(os.environ)
    env["PYTHONPATH"] = str(SRC)
    return subprocess.run(
        [sys.executable, "-m", "mvdatalog", *argv],
        capture_output=True,
        text=True,
        env=env,
        timeout=120,
    )


@pytest.fixture()
def files(tmp_path):
    out = {}
    for name, text in {
        "orca": ORCA,
        "kp": KEY_PERSON,
        "nulls": NULLS,
        "unsat": INCONSISTENT,
        "selfloop": SELF_FEEDING,
    }.items():
        path = tmp_path / f"{name}.mvdl"
        path.write_text(text, encoding="utf-8")
        out[name] = str(path)
    return out


class TestSolve:
    def test_orca_json(self, files):
        proc = run_cli("solve", files["orca"])
        assert proc.returncode == 0
        payload = json.loads(proc.stdout)
        assert payload["status"] == "ok" and payload["kind"] == "minimal"
        assert {"atom": "orca(i1)", "degree": "1/2", "source": "derived"} in payload["model"]

    def test_unsatisfiable_exit_2(self, files):
        proc = run_cli("solve", files["unsat"])
        assert proc.returncode == 2
        assert json.loads(proc.stdout)["status"] == "unsatisfiable"

    def test_relaxed_mode_lifts_the_conflict(self, files):
        proc = run_cli("solve", files["unsat"], "--mode", "relaxed")
        assert proc.returncode == 0
        model = {e["atom"]: e["degree"] for e in json.loads(proc.stdout)["model"]}
        assert model["s(a)"] == "1"
        assert model["r(a)"] == "1"

    def test_preferred_model_for_existentials(self, files):
        proc = run_cli("solve", files["kp"])
        assert proc.returncode == 0
        payload = json.loads(proc.stdout)
        assert payload["kind"] == "preferred"
        model = {e["atom"]: e["degree"] for e in payload["model"]}
        assert model["kp(_:n1, acme)"] == "1/5"

    def test_no_oblivious_base_exit_5(self, files):
        proc = run_cli("solve", files["nulls"])
        assert proc.returncode == 5
        assert json.loads(proc.stdout)["status"] == "no-oblivious-base-model"

    def test_parse_error_exit_3(self, files, tmp_path):
        bad = tmp_path / "bad.mvdl"
        bad.write_text("p(a", encoding="utf-8")
        proc = run_cli("solve", str(bad))
        assert proc.returncode == 3
        assert "error" in proc.stderr

    def test_non_weakly_acyclic_requires_limit_exit_4(self, files):
        proc = run_cli("solve", files["selfloop"])
        assert proc.returncode == 4
        assert "weakly acyclic" in proc.stderr

    def test_exceeded_limit_exit_4(self, files):
        proc = run_cli("solve", files["selfloop"], "--max-chase-steps", "5")
        assert proc.returncode == 4

    def test_custom_k(self, files):
        proc = run_cli("solve", files["orca"], "--K", "4/5")
        model = {e["atom"]: e["degree"] for e in json.loads(proc.stdout)["model"]}
        assert model["orca(i1)"] == "3/10"

    def test_byte_determinism(self, files):
        a = run_cli("solve", files["orca"])
        b = run_cli("solve", files["orca"])
        assert a.stdout == b.stdout

    def test_fast_path_toggle_same_model(self, files):
        a = run_cli("solve", files["orca"])
        b = run_cli("solve", files["orca"], "--no-fast-path")
        assert json.loads(a.stdout)["model"] == json.loads(b.stdout)["model"]

    def test_text_format(self, files):
        proc = run_cli("solve", files["orca"], "--format", "text")
        assert proc.returncode == 0
        assert "orca(i1) = 1/2" in proc.stdout

    def test_multiple_files_merge(self, files, tmp_path):
        extra = tmp_path / "extra.mvdl"
        extra.write_text("0.9 :: polar(i2).\n0.8 :: label(i2, whale).", encoding="utf-8")
        proc = run_cli("solve", files["orca"], str(extra))
        model = {e["atom"]: e["degree"] for e in json.loads(proc.stdout)["model"]}
        assert model["orca(i2)"] == "7/10"


class TestQuery:
    def test_entailed_exit_0(self, files):
        proc = run_cli("query", files["orca"], "orca(i1)", "--at-least", "0.5")
        assert proc.returncode == 0
        payload = json.loads(proc.stdout)
        assert payload["entailed"] is True and payload["degree"] == "1/2"

    def test_not_entailed_exit_1(self, files):
        proc = run_cli("query", files["orca"], "orca(i1)", "--at-least", "0.6")
        assert proc.returncode == 1
        assert json.loads(proc.stdout)["entailed"] is False

    def test_absent_atom_zero_threshold(self, files):
        proc = run_cli("query", files["orca"], "whale(i9)", "--at-least", "0")
        assert proc.returncode == 0

    def test_non_ground_query_exit_3(self, files):
        proc = run_cli("query", files["orca"], "orca(X)", "--at-least", "0.5")
        assert proc.returncode == 3

    def test_unsat_exit_2(self, files):
        proc = run_cli("query", files["unsat"], "s(a)", "--at-least", "0.5")
        assert proc.returncode == 2

    def test_model_relative_flag(self, files):
        proc = run_cli("query", files["kp"], "kp(amy, acme)", "--at-least", "0.8")
        assert proc.returncode == 0
        assert json.loads(proc.stdout)["model_relative"] is True


class TestCheck:
    def test_self_feeding_reported(self, files):
        proc = run_cli("check", files["selfloop"])
        assert proc.returncode == 0
        payload = json.loads(proc.stdout)
        assert payload["weakly_acyclic"] is False
        assert "p*" in payload["witness"]
        assert payload["satisfiable"] is None

    def test_key_person_accepted(self, files):
        proc = run_cli("check", files["kp"])
        payload = json.loads(proc.stdout)
        assert payload["weakly_acyclic"] is True
        assert payload["satisfiable"] is True
        assert payload["stats"]["gamma"] == 1

    def test_datalog_stats(self, files):
        proc = run_cli("check", files["orca"])
        payload = json.loads(proc.stdout)
        assert payload["weakly_acyclic"] is True
        assert payload["stats"] == {
            "olim": 3,
            "gamma": 1,
            "lp_variables": 3,
            "lp_constraints": 1,
        }

    def test_unsat_reported_but_exit_0(self, files):
        proc = run_cli("check", files["unsat"])
        assert proc.returncode == 0
        assert json.loads(proc.stdout)["satisfiable"] is False


class TestGround:
    def test_nulls_example_dump(self, files):
        proc = run_cli("ground", files["nulls"])
        assert proc.returncode == 0
        payload = json.loads(proc.stdout)
        assert len(payload["gamma"]) == 2
        assert len(payload["nulls"]) == 1
        assert payload["nulls"][0]["nulls"] == ["_:n1"]
        assert payload["olim"] == ["p(a, _:n1)", "s(a)", "t(a)"]

    def test_existential_constraint_lists_both_matches(self, files):
        proc = run_cli("ground", files["kp"])
        payload = json.loads(proc.stdout)
        (constraint,) = payload["lp"]["constraints"]
        assert set(constraint["coeffs"]) == {"company(acme)", "kp(amy, acme)", "kp(_:n1, acme)"}
        assert payload["lp"]["secondary"] == {"kp(_:n1, acme)": "1"}

    def test_empty_program(self, files, tmp_path):
        empty = tmp_path / "empty.mvdl"
        empty.write_text("p(a).", encoding="utf-8")
        proc = run_cli("ground", str(empty))
        payload = json.loads(proc.stdout)
        assert payload["gamma"] == []

    def test_lp_text_dump(self, files):
        proc = run_cli("ground", files["orca"], "--format", "text")
        assert proc.returncode == 0
        assert "minimize" in proc.stdout and "subject to" in proc.stdout
