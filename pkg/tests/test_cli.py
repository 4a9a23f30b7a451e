import json
import math
import os
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from hermat.cli import main
from hermat.io import read_matrix, write_matrix

DATA = Path(__file__).parent / "data"
GOLDEN = Path(__file__).parent / "golden"
# HERMAT_REGEN_GOLDEN=1 rewrites the golden files instead of comparing
REGEN = os.environ.get("HERMAT_REGEN_GOLDEN") == "1"
C1, S1 = math.cosh(1.0), math.sinh(1.0)


def run(argv, capsys, tmp_path=None):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def parse(out):
    head, sep, body = out.partition("\n---\n")
    assert sep, "missing separator"
    kv = dict(line.split("=", 1) for line in head.splitlines())
    return kv, json.loads(body)


def normalize(out, tmp_path=None):
    """Drop wall-clock timing and machine-specific paths."""
    kv, data = parse(out)
    kv.pop("timing_ms")
    data["diagnostics"].pop("timing_ms")
    text = "\n".join(f"{k}={v}" for k, v in kv.items()) + "\n---\n" + json.dumps(data, indent=1, sort_keys=True)
    text = text.replace(str(DATA), "<data>")
    if tmp_path is not None:
        text = text.replace(str(tmp_path), "<tmp>")
    return text + "\n"


def check_golden(name, out, tmp_path=None):
    text = normalize(out, tmp_path)
    path = GOLDEN / f"{name}.txt"
    if REGEN:
        path.write_text(text)
    assert text == path.read_text()


def complex_of(text):
    re, im = text.split(",")
    return complex(float(re), float(im))


def test_funm_swap_exp(capsys, tmp_path):
    out_file = tmp_path / "F.json"
    code, out, _ = run(["funm", DATA / "swap.json", "--spec", DATA / "pm.json", "-f", "exp", "--out", out_file], capsys)
    assert code == 0
    F = read_matrix(out_file)
    assert np.allclose(F, [[C1, S1], [S1, C1]], rtol=0, atol=1e-12)
    kv, data = parse(out)
    assert float(kv["annihilation_residual"]) <= 1e-15
    meta = json.loads(out_file.read_text())["meta"]
    assert meta["function"] == "exp" and "annihilation_residual" in meta
    check_golden("funm_swap_exp", out, tmp_path)


def test_funm_zero_auto_spec(capsys):
    code, out, _ = run(["funm", DATA / "zero.json", "--auto-spec", "-f", "exp"], capsys)
    assert code == 0
    _, data = parse(out)
    rows = data["outputs"]["matrix"]["rows"]
    assert rows == [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]
    check_golden("funm_zero_auto", out)


def test_funm_annihilation_failure(capsys):
    code, out, err = run(["funm", DATA / "jordan.json", "--spec", DATA / "two.json", "-f", "exp"], capsys)
    assert code == 2
    kv, data = parse(out)
    assert float(kv["annihilation_residual"]) == pytest.approx(math.sqrt(3), rel=1e-15)
    assert kv["status"] == "annihilation_failure"
    assert "does not annihilate" in err
    check_golden("funm_jordan_fail", out)


def test_expm_alias(capsys):
    code, out, _ = run(["expm", DATA / "swap.json", "--spec", DATA / "pm.json", "--t", "-0.5"], capsys)
    assert code == 0
    kv, data = parse(out)
    assert kv["function"] == "exp:t=-0.5"
    F = np.array([[complex(*e) for e in row] for row in data["outputs"]["matrix"]["rows"]])
    c, s = math.cosh(0.5), -math.sinh(0.5)
    assert np.allclose(F, [[c, s], [s, c]], atol=1e-13)
    check_golden("expm_swap", out)


@pytest.mark.parametrize("matrix,spec,expected", [
    ("diag23.json", "r23.json", {"E_0": np.diag([1, 0]), "E_1": np.diag([0, 1]), "N": np.zeros((2, 2))}),
    ("jordan.json", "one_double.json", {"E_0": np.eye(2), "N_0": [[0, 1], [0, 0]]}),
    ("swap.json", "pm.json", {"E_0": 0.5 * np.ones((2, 2)), "E_1": [[0.5, -0.5], [-0.5, 0.5]]}),
])
def test_spectral(capsys, tmp_path, matrix, spec, expected):
    code, out, _ = run(["spectral", DATA / matrix, "--spec", DATA / spec, "--out-dir", tmp_path], capsys)
    assert code == 0
    kv, data = parse(out)
    assert kv["violations"] == "none"
    for name, ref in expected.items():
        assert np.allclose(read_matrix(tmp_path / f"{name}.json"), ref, rtol=0, atol=1e-15)
    assert (tmp_path / "report.json").exists() and (tmp_path / "S.json").exists()
    check_golden(f"spectral_{Path(matrix).stem}", out, tmp_path)


@pytest.mark.parametrize("spec,init,forcing,t,expected", [
    ("pm.json", "1,0", "zero", "1", C1),
    ("z1.json", "0", "const:1,0", "2", 2.0),
    ("z2.json", "0,0", "const:1,0", "1", 0.5),
])
def test_ode(capsys, spec, init, forcing, t, expected):
    code, out, _ = run(["ode", DATA / spec, "--init", init, "--forcing", forcing, "--t", t], capsys)
    assert code == 0
    kv, _ = parse(out)
    assert abs(complex_of(kv["u"]) - expected) <= 1e-10
    check_golden(f"ode_{Path(spec).stem}", out)


def test_ode_grid(capsys):
    code, out, _ = run(["ode", DATA / "z2.json", "--init", "0,0", "--forcing", "const:1,0", "--t", "1", "--grid", "4"], capsys)
    assert code == 0
    _, data = parse(out)
    for ti, re, im in data["outputs"]["grid"]:
        assert re == pytest.approx(ti * ti / 2, abs=1e-12) and im == 0


def test_ode_quadrature_failure(capsys):
    code, out, err = run(["ode", DATA / "pm.json", "--init", "0,0", "--forcing", "exp:30,0",
                          "--t", "1", "--quad-tol", "1e-300"], capsys)
    assert code == 3
    kv, data = parse(out)
    assert kv["status"] == "quadrature_failure"
    assert float(kv["achieved_tol"]) > 0 and "best_estimate" in kv
    assert "did not converge" in err


@pytest.mark.parametrize("spec,p,n_max,method,expected", [
    ("pm.json", 0, 1, "closed", [0.5, -0.25]),
    ("z3.json", 0, 2, "closed", [1, 0, 0]),
    ("z2z1.json", 0, 1, "both", [-1, -1]),
])
def test_coeffs(capsys, spec, p, n_max, method, expected):
    code, out, _ = run(["coeffs", DATA / spec, "--p", p, "--n-max", n_max, "--method", method], capsys)
    assert code == 0
    kv, data = parse(out)
    prefix = "closed." if method == "both" else ""
    got = [complex_of(kv[f"{prefix}b[{n}]"]) for n in range(n_max + 1)]
    assert np.allclose(got, expected, rtol=0, atol=1e-15)
    if method == "both":
        assert float(kv["max_deviation"]) < 1e-12
    check_golden(f"coeffs_{Path(spec).stem}", out)


def test_charpoly(capsys):
    code, out, _ = run(["charpoly", DATA / "jordan.json"], capsys)
    assert code == 0
    kv, _ = parse(out)
    assert [complex_of(kv[f"c[{m}]"]) for m in range(3)] == [1, -2, 1]
    check_golden("charpoly_jordan", out)


@pytest.mark.parametrize("argv", [
    [],
    ["funm"],
    ["funm", "swap.json", "--spec", "pm.json", "-f", "tan"],
    ["funm", "swap.json", "-f", "exp"],
    ["funm", "missing.json", "--spec", "pm.json", "-f", "exp"],
    ["funm", "pm.json", "--spec", "pm.json", "-f", "exp"],
    ["coeffs", "pm.json", "--p", "5", "--n-max", "1"],
    ["coeffs", "pm.json", "--p", "0", "--n-max", "-1"],
    ["ode", "pm.json", "--init", "1", "--t", "1"],
    ["ode", "pm.json", "--init", "1,x", "--t", "1"],
    ["ode", "pm.json", "--init", "1,0", "--t", "1", "--forcing", "bogus"],
    ["ode", "pm.json", "--init", "1,0", "--t", "1", "--quad-tol", "0"],
    ["coeffs", "pm.json", "--p", "0", "--n-max", "1", "--method", "magic"],
])
def test_usage_errors_exit_64(capsys, argv, monkeypatch):
    monkeypatch.chdir(DATA)
    try:
        code = main(argv)
    except SystemExit as exc:
        code = exc.code
    capsys.readouterr()
    assert code == 64


def test_round_trip_through_cli_is_bit_exact(capsys, tmp_path):
    rng = np.random.default_rng(11)
    A = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    src = tmp_path / "A.json"
    write_matrix(src, A)
    # poly:0,1 is the identity function, so the output should equal A up to rounding;
    # the file it writes must re-read to exactly the values in the report
    out_file = tmp_path / "F.json"
    code, out, _ = run(["funm", src, "--auto-spec", "-f", "poly:0,1", "--out", out_file], capsys)
    assert code == 0
    _, data = parse(out)
    F = read_matrix(out_file)
    reported = np.array([[complex(*e) for e in row] for row in data["outputs"]["matrix"]["rows"]])
    assert F.tobytes() == reported.tobytes()
    assert np.allclose(F, A, atol=1e-8)
    write_matrix(tmp_path / "again.json", F)
    assert read_matrix(tmp_path / "again.json").tobytes() == F.tobytes()


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "hermat", "charpoly", str(DATA / "swap.json")],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "c[0]=-1,0" in proc.stdout
