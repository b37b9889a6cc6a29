import csv
import io
import json
import subprocess
import sys

import pytest

from rellab import __version__
from rellab.cli import OVERRIDE_WARNING, run
from rellab.ground_state import POSITIVITY_WARNING


def call(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def payload(capsys, *argv):
    code, out, err = call(capsys, *argv)
    assert code == 0, err
    return json.loads(out)


def test_constants_n5_q3(capsys):
    env = payload(capsys, "constants", "--N", "5", "--q", "3")
    p = env["payload"]
    assert p["gamma_N"] == 1.25 and p["beta"] == 3.5 and p["lambda_basic"] == -32
    assert env["tool"] == "rellab" and env["version"] == __version__
    assert env["command"] == "constants"
    assert env["warnings"]


def test_config_echo_includes_defaults(capsys):
    env = payload(capsys, "constants", "--N", "6", "--q", "2.5")
    cfg = env["config"]
    assert cfg["lambda"] == 0.0 and cfg["alpha"] is None and cfg["format"] == "json"
    assert "timestamp" in env


def test_constants_weighted(capsys):
    p = payload(capsys, "constants", "--N", "5", "--q", "3", "--alpha", "1")["payload"]
    assert p["gamma_bar_N_alpha"] - p["gamma_N_alpha"] == pytest.approx(0.5, abs=1e-12)


def test_solve_n8(capsys):
    p = payload(capsys, "solve", "--N", "8", "--q", "3", "--lambda", "0")["payload"]
    assert p["is_positive"] is True and p["is_even"] is True
    assert p["certified_breaking"] is False and p["X"] > 6


def test_solve_raw_coefficients_with_shooting(capsys, tmp_path):
    prof = tmp_path / "w.csv"
    code, out, err = call(
        capsys, "solve", "--A", "13", "--B", "12", "--q", "3", "--N", "5", "--shoot", "--profile-out", str(prof)
    )
    assert code == 0
    p = json.loads(out)["payload"]
    assert p["peak"] == pytest.approx(210, rel=1e-4)
    assert p["shooting_distance"] < 1e-4
    assert OVERRIDE_WARNING in err
    assert prof.read_text().startswith("s,w\n")


def test_solve_negative_lambda_warns(capsys):
    code, out, err = call(capsys, "solve", "--N", "5", "--q", "3", "--lambda", "-64", "--M", "2049")
    assert code == 0 and POSITIVITY_WARNING in err
    env = json.loads(out)
    assert POSITIVITY_WARNING in env["warnings"] and env["payload"]["certified_breaking"] is True


@pytest.mark.parametrize(
    "argv, name",
    [
        (["solve", "--q", "1.5", "--N", "5"], "ExponentOutOfRange"),
        (["solve", "--q", "3", "--N", "4"], "DimensionTooSmall"),
        (["constants", "--N", "5", "--q", "3", "--lambda", "2"], "LambdaAboveRellich"),
        (["solve", "--q", "3", "--A", "13"], "UsageError"),
        (["solve", "--q", "3"], "UsageError"),
        (["cone", "--N", "5", "--t", "4"], "ParameterOutOfRange"),
        (["sweep", "--N", "5", "--q", "3"], "UsageError"),
        (["bogus"], "UsageError"),
        (["constants", "--N", "x", "--q", "3"], "UsageError"),
    ],
)
def test_validation_exits_1(capsys, argv, name):
    code, out, err = call(capsys, *argv)
    assert code == 1 and out == ""
    assert name in err


def test_numerical_failure_exits_2(capsys):
    code, _, err = call(capsys, "solve", "--A", "6", "--B", "5", "--q", "3", "--max-iters", "1", "--init", "gaussian")
    assert code == 2 and "NonConvergence" in err


def test_verify_explicit(capsys):
    p = payload(capsys, "verify-explicit", "--M-list", "2049", "4097", "--N", "5")["payload"]
    assert p["C"] == pytest.approx(210) and p["second_derivative_at_zero"] == pytest.approx(-420)
    assert 3.8 < p["refinement"][1]["ratio"] < 4.2
    assert p["radial"]["pde_residual"] < 1e-5
    assert p["radial"]["pde_residual_printed_lambda"] > 1e3 * p["radial"]["pde_residual"]


def test_sweep_csv_and_jsonl(capsys, tmp_path):
    code, out, _ = call(capsys, "sweep", "--N", "5", "--q", "3", "--lambdas", "0", "-64", "--M", "1025", "--format", "csv")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["lambda", "I", "X", "g_of_X", "certified_breaking"]
    assert [r[0] for r in rows[1:]] == ["-64", "0"] and [r[-1] for r in rows[1:]] == ["true", "false"]
    out_file = tmp_path / "s.jsonl"
    code, out, _ = call(
        capsys, "sweep", "--N", "5", "--q", "3", "--lambda-min", "-10", "--lambda-max", "0", "--steps", "3",
        "--M", "1025", "--workers", "1", "--format", "jsonl", "--out", str(out_file),
    )
    assert code == 0 and out == ""
    recs = [json.loads(x) for x in out_file.read_text().splitlines()]
    assert [r["lambda"] for r in recs] == [-10, -5, 0]


def test_cone(capsys):
    p = payload(capsys, "cone", "--N", "5", "--samples", "20")["payload"]
    assert p["hardy"] == 0.25 and p["rellich"] == pytest.approx(25 / 16)
    assert p["hardy_holds"] is True
    assert p["grad_shell_ratios"][-1] == pytest.approx(1, rel=1e-3)
    assert p["bilap_shell_ratios"][-1] == pytest.approx(0.25, rel=1e-3)
    p = payload(capsys, "cone", "--N", "5", "--cone", "HalfSphere", "--samples", "5")["payload"]
    assert p["hardy"] == 4.25


def test_csv_is_deterministic(capsys):
    argv = ["solve", "--A", "6", "--B", "5", "--q", "3", "--init", "random", "--seed", "7", "--M", "1025", "--format", "csv"]
    first = call(capsys, *argv)[1]
    second = call(capsys, *argv)[1]
    assert first == second
    line = first.splitlines()[1].split(",")
    assert len(line) == 2


def test_csv_uses_full_precision(capsys):
    out = call(capsys, "constants", "--N", "7", "--q", "3", "--format", "csv")[1]
    rows = dict(csv.reader(io.StringIO(out)))
    assert float(rows["gamma_N"]) == 21 / 4
    assert float(rows["omega_N"]) == pytest.approx(16 * 3.141592653589793**3 / 15, rel=1e-16)


def test_selftest(capsys):
    env = payload(capsys, "selftest")
    assert all(c["passed"] for c in env["payload"])


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "rellab", "constants", "--N", "5", "--q", "3", "--format", "jsonl"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["payload"]["lambda_basic"] == -32
