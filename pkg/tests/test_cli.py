import json
import subprocess
import sys

import pytest

from chshlab.cli import main

from conftest import FIXTURES


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_certify_table(capsys):
    code, out, _ = run(capsys, "certify", "--samples", "500")
    assert code == 0
    for bound in ("2 ", "2.8284271247", "4 "):
        assert bound in out
    assert "FAIL" not in out and out.count("pass") >= 4


def test_certify_json(capsys):
    code, out, _ = run(capsys, "certify", "--samples", "200", "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["passed"] and len(data["rows"]) == 4


def test_eval_pr_box(capsys):
    code, out, _ = run(capsys, "eval", str(FIXTURES / "pr_box.json"), "--format", "json")
    data = json.loads(out)
    assert code == 0
    assert data["value"] == 4.0 and data["regime"] == "maximal" and data["no_signaling"]


def test_eval_lhv_and_quantum(capsys, tmp_path):
    code, out, _ = run(capsys, "eval", str(FIXTURES / "lhv_two_states.json"))
    assert code == 0 and "model: lhv" in out and "value: 0\n" in out
    _, out, _ = run(capsys, "optimize", str(FIXTURES / "singlet_state.json"))
    strategy = tmp_path / "strategy.json"
    data = json.loads(out)
    strategy.write_text(json.dumps({"state": data["state"], "settings": data["settings"]}))
    code, out, _ = run(capsys, "eval", str(strategy), "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["model"] == "quantum"
    assert data["value"] == pytest.approx(2 * 2**0.5, abs=1e-9)


def test_optimize(capsys):
    code, out, _ = run(capsys, "optimize", str(FIXTURES / "product_state.json"))
    data = json.loads(out)
    assert code == 0 and data["value"] == pytest.approx(2.0, abs=1e-9)


def test_surface_small(capsys):
    code, out, _ = run(capsys, "surface", "--theta-steps", "2", "--q-steps", "2")
    rows = [ln for ln in out.splitlines() if ln and not ln.startswith("#")]
    assert code == 0 and rows[0] == "theta,q,chsh_signed,chsh_abs" and len(rows) == 5


def test_vandam_output_file(tmp_path, capsys):
    target = tmp_path / "curve.csv"
    code, out, _ = run(capsys, "vandam", "--n", "3", "--trials", "100", "--x-grid", "1,4", "--output", str(target))
    assert code == 0 and out == ""
    lines = target.read_text().splitlines()
    assert lines[0] == "# X_cc = 3.2659863237" and len(lines) == 5


@pytest.mark.parametrize(
    "argv",
    [
        ["certify", "--seed", "3", "--samples", "300"],
        ["vandam", "--n", "4", "--trials", "500", "--x-points", "3", "--seed", "5"],
        ["optimize", str(FIXTURES / "singlet_state.json"), "--seed", "2"],
        ["surface", "--theta-steps", "7", "--q-steps", "3", "--format", "json"],
    ],
)
def test_byte_identical(capsys, argv):
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second and first


def test_exit_codes(capsys, tmp_path):
    assert run(capsys, "eval", str(tmp_path / "missing.json"))[0] == 2
    assert run(capsys, "bogus")[0] == 1
    assert run(capsys)[0] == 1
    assert run(capsys, "vandam", "--x-grid", "1,nope")[0] == 1
    assert run(capsys, "vandam", "--x-grid", "5")[0] == 1
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"probs": [0.5] * 16}))
    code, _, err = run(capsys, "eval", str(bad))
    assert code == 1 and err.startswith("chshlab: ")


def test_config_file(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"theta_steps": 2, "q_steps": 2}))
    code, out, _ = run(capsys, "--config", str(cfg), "surface")
    assert code == 0 and len([ln for ln in out.splitlines() if not ln.startswith("#")]) == 5
    cfg.write_text(json.dumps({"nonsense": 1}))
    assert run(capsys, "--config", str(cfg), "surface")[0] == 1


def test_help_shows_defaults():
    out = subprocess.run(
        [sys.executable, "-m", "chshlab", "vandam", "--help"], capture_output=True, text=True, check=True
    ).stdout
    assert "default: 8" in out and "default: 10000" in out
