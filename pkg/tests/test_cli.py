import json
import subprocess
import sys

import numpy as np
import pytest

from ergocoef import mmio
from ergocoef.cli import dumps_stable, main
from ergocoef.generators import random_primitive_with_gap

from conftest import A3


@pytest.fixture
def files(tmp_path):
    paths = {}

    def put(name, A):
        p = tmp_path / name
        mmio.write_matrix(p, np.asarray(A, dtype=float))
        paths[name] = str(p)

    put("A3.mtx", A3)
    put("uniform.mtx", np.full((3, 3), 1 / 3))
    put("two.csv", [[0.9, 0.2], [0.1, 0.8]])
    put("eye.json", np.eye(3))
    put("perm.mtx", np.roll(np.eye(3), 1, axis=0))
    put("diag.mtx", np.diag([1.0, 0.5, 0.25]))
    put("e1.mtx", [[1.0], [0.0], [0.0]])
    put("reducible.mtx", [[0.5, 0.0], [0.5, 1.0]])
    rng = np.random.default_rng(5)
    put("prim5.mtx", random_primitive_with_gap(5, rng))
    return paths


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    report = json.loads(out.out) if out.out else None
    return code, report, out.err


def test_coeff_examples(files, capsys):
    code, rep, _ = run(capsys, "coeff", files["A3.mtx"], "--coef", "tau_m_min", "--m", 1)
    assert code == 0 and rep["result"]["value"] == pytest.approx(0.06, abs=1e-12)
    code, rep, _ = run(capsys, "coeff", files["A3.mtx"], "--coef", "tau_m", "--m", 1)
    assert code == 0 and rep["result"]["value"] == pytest.approx(0.55, abs=1e-12)
    code, rep, _ = run(capsys, "coeff", files["uniform.mtx"], "--coef", "tau_n1")
    assert code == 0 and rep["result"]["value"] == pytest.approx(0.0, abs=1e-15)
    assert len(rep["input_digest"]) == 64 and rep["version"]


def test_coeff_norm_based(files, capsys):
    code, rep, _ = run(capsys, "coeff", files["diag.mtx"], "--coef", "phi", "--w", files["e1.mtx"])
    assert code == 0 and rep["result"]["value"] == pytest.approx(0.5)
    assert rep["result"]["method"] == "projected_svd"
    code, rep, _ = run(capsys, "coeff", files["A3.mtx"], "--coef", "tau_haviv")
    assert code == 0 and rep["result"]["value"] == pytest.approx(0.57)
    for name in ("mu", "tau_vecnorm"):
        code, rep, _ = run(capsys, "coeff", files["A3.mtx"], "--coef", name, "--norm", "one")
        assert code == 0 and rep["result"]["certified_exact"]
    code, rep, _ = run(capsys, "coeff", files["A3.mtx"], "--coef", "mu", "--norm", "box:one",
                       "--budget", 1000)
    assert code == 0 and rep["result"]["method"] == "monte_carlo"


@pytest.mark.parametrize("argv", [
    ["--coef", "tau_m"],
    ["--coef", "phi"],
    ["--coef", "tau_n1", "--norm", "four"],
    ["--coef", "nope"],
])
def test_coeff_validation_exit_2(files, capsys, argv):
    assert run(capsys, "coeff", files["A3.mtx"], *argv)[0] == 2


def test_unreadable_and_malformed_files(files, tmp_path, capsys):
    assert run(capsys, "check", tmp_path / "missing.mtx")[0] == 2
    bad = tmp_path / "bad.csv"
    bad.write_text("1,2\n3\n")
    assert run(capsys, "check", bad)[0] == 2


def test_precondition_exit_3(files, capsys):
    code, _, err = run(capsys, "coeff", files["A3.mtx"], "--coef", "mu", "--x", files["e1.mtx"])
    assert code == 3 and "precondition" in err


def test_stationary_command(files, capsys):
    code, rep, _ = run(capsys, "stationary", files["two.csv"])
    assert code == 0
    np.testing.assert_allclose(rep["result"]["msystem"]["x"], [2 / 3, 1 / 3], atol=1e-15)
    assert rep["result"]["msystem"]["residual"] <= 1e-12
    assert rep["result"]["discrepancy"] <= 1e-12
    code, rep, _ = run(capsys, "stationary", files["uniform.mtx"], "--method", "msystem")
    np.testing.assert_allclose(rep["result"]["msystem"]["x"], 1 / 3)
    code, _, err = run(capsys, "stationary", files["eye.json"], "--method", "msystem")
    assert code == 3 and "tau_n1 = 1" in err


def test_limit_command(files, capsys):
    code, rep, _ = run(capsys, "limit", files["diag.mtx"], "--study", "phi",
                       "--w", files["e1.mtx"], "--kmax", 64)
    assert code == 0
    np.testing.assert_allclose([v for _, v in rep["result"]["table"]], 0.5, rtol=1e-13)
    code, rep, _ = run(capsys, "limit", files["prim5.mtx"], "--kmax", 256)
    assert code == 0 and rep["result"]["converged"]
    code, rep, _ = run(capsys, "limit", files["reducible.mtx"])
    assert code == 0 and "converged" in rep["result"]
    assert run(capsys, "limit", files["diag.mtx"], "--study", "phi")[0] == 2


def test_conjecture_command(files, capsys):
    code, rep, err = run(capsys, "conjecture", "--n", 3, "--inject", files["A3.mtx"],
                         "--variant", "min", "--trials", 0)
    assert code == 1 and rep["result"]["violations"] == 1
    assert rep["result"]["findings"][0]["k"] == 3 and "violation" in err
    code, rep, _ = run(capsys, "conjecture", "--n", 3, "--inject", files["A3.mtx"],
                       "--variant", "max", "--trials", 0)
    assert code == 0 and rep["result"]["violations"] == 0
    assert run(capsys, "conjecture", "--n", 12)[0] == 2


def test_check_command(files, capsys):
    _, rep, _ = run(capsys, "check", files["A3.mtx"])
    r = rep["result"]
    assert r["irreducible"] and r["primitive"] and r["bound_lambda2"]["bound_holds"]
    assert r["corollary"]["corollary_respected"]
    _, rep, _ = run(capsys, "check", files["perm.mtx"])
    assert rep["result"]["irreducible"] and not rep["result"]["primitive"]
    _, rep, _ = run(capsys, "check", files["eye.json"])
    assert not rep["result"]["irreducible"]


def test_reports_are_byte_stable(files, capsys):
    argvs = [
        ["conjecture", "--n", 4, "--trials", 300, "--seed", 7, "--variant", "max"],
        ["coeff", files["A3.mtx"], "--coef", "phi", "--w", files["e1.mtx"], "--norm", "box:one",
         "--budget", 5000],
        ["limit", files["prim5.mtx"]],
    ]
    for argv in argvs:
        main([str(a) for a in argv])
        first = capsys.readouterr().out
        main([str(a) for a in argv])
        assert capsys.readouterr().out == first


def test_timing_is_opt_in(files, capsys):
    _, rep, _ = run(capsys, "check", files["A3.mtx"])
    assert "wall_time_s" not in rep
    _, rep, _ = run(capsys, "check", files["A3.mtx"], "--timing")
    assert rep["wall_time_s"] >= 0


def test_dumps_stable_format():
    text = dumps_stable({"b": 0.1, "a": [1, float("nan")], "c": np.float64(1 / 3)})
    assert text.index('"a"') < text.index('"b"')
    assert "0.10000000000000001" in text and "null" in text
    assert "0.33333333333333331" in text


def test_module_entry_point(files):
    proc = subprocess.run([sys.executable, "-m", "ergocoef", "coeff", files["A3.mtx"],
                           "--coef", "tau_m", "--m", "1"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"]["value"] == pytest.approx(0.55)
