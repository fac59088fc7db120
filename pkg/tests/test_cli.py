import json
import shutil
import subprocess

import pytest

from braidrep.bvs import flip_bvs
from braidrep.cli import load_inputs, main
from braidrep.cyclo import make_root
from braidrep.errors import InvariantError, ParseError
from braidrep.grouptype import FiniteGroup, PhaseTwist, SetSolution


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    lines = [ln for ln in out.splitlines() if ln.strip()]
    assert len(lines) == 1, out
    return code, json.loads(lines[0])


def test_gaussian_ybe(capsys):
    code, out = run(capsys, "gaussian", "--m", "3", "--check", "ybe")
    assert code == 0
    assert out["check"] == "ybe" and out["m"] == 3 and out["holds"] is True
    assert set(out) >= {"check", "holds", "details"}


@pytest.mark.parametrize("check", ["unitary", "relations", "conjugation", "gauss-sum", "jones"])
def test_gaussian_checks(capsys, check):
    code, out = run(capsys, "gaussian", "--m", "4", "--n", "3", "--check", check)
    assert code == 0 and out["holds"]


def test_gaussian_factorization(capsys):
    code, out = run(capsys, "gaussian", "--m", "6", "--check", "factorization")
    assert code == 0 and out["holds"]
    code, out = run(capsys, "gaussian", "--m", "9", "--check", "factorization")
    assert code == 4 and out["type"] == "NotApplicable"


def test_braid_eval_identity(capsys):
    code, out = run(capsys, "braid", "eval", "--word", "s1 s1^-1", "--bvs", "flip2")
    assert code == 0 and out["is_identity"]
    assert out["matrix"]["rows"] == 4


def test_braid_eval_b3_fixture(capsys):
    code, out = run(capsys, "braid", "eval", "--word", "1 2 1 -2 -1 -2", "--bvs", "discussion-example:5")
    assert code == 0 and out["is_identity"]


def test_image_gaussian(capsys):
    code, out = run(capsys, "image", "--bvs", "gaussian:2", "--n", "3", "--budget", "1000000")
    assert code == 0
    assert out["status"] == "Finite" and out["order"] == 48
    assert out["monomial_certificate"] is None
    code, out = run(capsys, "image", "--bvs", "gaussian:2", "--n", "3", "--projective")
    assert out["order"] == 24


def test_image_budget_exceeded(capsys):
    code, out = run(capsys, "image", "--bvs", "gaussian:2", "--n", "4", "--budget", "10")
    assert code == 3 and out["status"] == "BudgetExceeded"


def test_budget_env(capsys, monkeypatch):
    monkeypatch.setenv("BRAIDREP_BUDGET", "5")
    code, out = run(capsys, "image", "--bvs", "gaussian:2", "--n", "3")
    assert code == 3 and out["budget"] == 5


def test_image_b3_fixture(capsys):
    code, out = run(capsys, "image", "--bvs", "discussion-example:7", "--n", "3", "--projective")
    assert code == 0 and out["order"] == 294
    assert out["monomial_certificate"]["perm_quotient_order"] == 6


def test_settheoretic(capsys, tmp_path):
    f = tmp_path / "flip.json"
    f.write_text(json.dumps(SetSolution.flip(2).to_json()))
    t = tmp_path / "twist.json"
    t.write_text(json.dumps(PhaseTwist.from_exponents([[0, 0], [0, 1]], 4).to_json()))
    code, out = run(capsys, "settheoretic", "--file", str(f), "--twist", str(t), "--check", "ybe")
    assert code == 0 and out["holds"]
    code, out = run(capsys, "settheoretic", "--file", str(f), "--twist", str(t), "--check", "image", "--n", "3")
    assert code == 0 and out["details"]["monomial"] and out["order"] > 0


def test_settheoretic_broken_twist(capsys, tmp_path):
    S3 = FiniteGroup.symmetric(3)
    f = tmp_path / "quandle.json"
    f.write_text(json.dumps(SetSolution.conjugation(S3, S3.conjugacy_class(1)).to_json()))
    phases = [[{"k": 0, "N": 1}] * 3 for _ in range(3)]
    phases[0][1] = {"k": 1, "N": 3}
    t = tmp_path / "twist.json"
    t.write_text(json.dumps({"phases": phases}))
    code, out = run(capsys, "settheoretic", "--file", str(f), "--twist", str(t))
    assert code == 2 and not out["holds"]
    assert len(out["details"]["twist_witness"]) == 3


def test_yd(capsys):
    code, out = run(capsys, "yd", "--group", "S3", "--class", "1", "--check", "ybe")
    assert code == 0 and out["holds"] and out["details"]["dim"] == 3
    code, out = run(capsys, "yd", "--group", "S3", "--class", "1", "--check", "image", "--n", "3")
    assert code == 0 and out["holds"] and out["monomial_certificate"]["perm_quotient_order"] > 0


def test_cocycle(capsys):
    code, out = run(capsys, "cocycle", "--n", "3", "--s", "1", "--check")
    assert code == 0 and out["holds"] and out["details"]["quadruples_checked"] == 81
    code, out = run(capsys, "cocycle", "--n", "2", "--s", "1", "--degree", "1")
    assert code == 0 and out["details"]["twisted_action_holds"]


def test_input_errors(capsys, tmp_path):
    code, out = run(capsys, "braid", "eval", "--word", "s0", "--bvs", "flip2")
    assert code == 4 and "error" in out
    code, out = run(capsys, "image", "--bvs", "nowhere", "--n", "3")
    assert code == 4
    code, out = run(capsys, "gaussian", "--m", "3")
    assert code == 4
    bad = tmp_path / "bad.json"
    bad.write_text('{"size": 2,\n "S": [}')
    code, out = run(capsys, "settheoretic", "--file", str(bad))
    assert code == 4 and out["type"] == "ParseError"


def test_load_inputs(tmp_path):
    p = tmp_path / "flip.json"
    p.write_text(json.dumps(SetSolution.flip(3).to_json()))
    assert load_inputs(p) == SetSolution.flip(3)

    table = [[0, 1, 2, 3, 4], [1, 0, 3, 4, 2], [2, 4, 0, 1, 3], [3, 2, 4, 0, 1], [4, 3, 1, 2, 0]]
    p.write_text(json.dumps({"order": 5, "table": table}))
    with pytest.raises(InvariantError) as e:
        load_inputs(p)
    assert e.value.invariant == "associativity"

    bad = (1 + make_root(1, 5)).to_json()
    p.write_text(json.dumps({"phases": [[{"k": 0, "N": 1}, bad], [{"k": 0, "N": 1}, {"k": 0, "N": 1}]]}))
    with pytest.raises(InvariantError) as e:
        load_inputs(p)
    assert e.value.invariant == "root of unity"

    p.write_text('{"order": 2, "table": [[0, 1],\n [1 0]]}')
    with pytest.raises(ParseError) as e:
        load_inputs(p)
    assert "line 2" in str(e.value)


def test_round_trips(tmp_path):
    objs = [
        SetSolution.conjugation(FiniteGroup.symmetric(3)),
        PhaseTwist.from_exponents([[0, 3], [5, 1]], 8),
        FiniteGroup.symmetric(3),
        flip_bvs(2),
    ]
    for obj in objs:
        p = tmp_path / "obj.json"
        p.write_text(json.dumps(obj.to_json()))
        assert load_inputs(p) == obj


@pytest.mark.skipif(shutil.which("braidrep") is None, reason="console script not installed")
def test_console_script():
    proc = subprocess.run(
        ["braidrep", "gaussian", "--m", "2", "--check", "unitary"], capture_output=True, text=True, check=False
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["holds"] is True
