import json
import subprocess
import sys

import numpy as np
import pytest

from conftest import EXAMPLE1_GAMMA
from gwlab import cli, mmspace


@pytest.fixture
def files(tmp_path):
    x = tmp_path / "x.csv"
    y = tmp_path / "y.csv"
    one = tmp_path / "one.csv"
    big = tmp_path / "big.csv"
    x.write_text("0,1\n1,0\n0.5,0.5\n", encoding="utf-8")
    y.write_text("0,1\n1,0\n0.25,0.75\n", encoding="utf-8")
    one.write_text("0\n1\n", encoding="utf-8")
    mmspace.save_space(mmspace.delta_space(4), big)
    return {"x": str(x), "y": str(y), "one": str(one), "big": str(big), "dir": tmp_path}


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_gamma_json(capsys, files):
    out_path = files["dir"] / "g.json"
    code, _, _ = run(capsys, "gamma", files["x"], files["y"], "--p", "1", "--out", str(out_path))
    assert code == 0
    data = json.loads(out_path.read_text())
    np.testing.assert_array_equal(data["gamma"], EXAMPLE1_GAMMA)
    assert data["rhs"] == [0.5, 0.5, 0.25, 0.75]


def test_gamma_csv_one_point(capsys, files):
    out_path = files["dir"] / "g.csv"
    code, _, _ = run(capsys, "gamma", files["one"], files["one"], "--out", str(out_path))
    assert code == 0
    assert out_path.read_text().strip() == "0.0"


def test_gamma_missing_file(capsys, files):
    code, _, err = run(capsys, "gamma", "/nonexistent.csv", files["y"])
    assert code == 2 and "not found" in err


def test_spectrum_example1(capsys, files):
    code, out, _ = run(capsys, "spectrum", files["x"], files["y"])
    data = json.loads(out)
    assert code == 0
    assert data["negative_count"] == 1 and data["minor_det"] == -1.0 and data["psd"] is False
    np.testing.assert_allclose(data["eigenvalues"], [-2, 0, 0, 2], atol=1e-10)


def test_spectrum_delta_10(capsys, files):
    y = files["dir"] / "d10.csv"
    mmspace.save_space(mmspace.delta_space(10), y)
    code, out, _ = run(capsys, "spectrum", files["x"], str(y))
    assert code == 0 and json.loads(out)["negative_count"] == 9


def test_spectrum_one_point(capsys, files):
    code, _, _ = run(capsys, "spectrum", files["one"], files["y"])
    assert code == 2


def test_spectrum_theorem_violation_exit_code(capsys, files, monkeypatch):
    from gwlab.errors import InternalInconsistency

    def boom(*a, **k):
        raise InternalInconsistency("forced")

    monkeypatch.setattr(cli, "certify_nonconvex", boom)
    code, _, err = run(capsys, "spectrum", files["x"], files["y"])
    assert code == 3 and "forced" in err


def test_solve_multistart(capsys, files):
    code, out, _ = run(capsys, "solve", files["x"], files["y"], "--method", "multistart", "--k", "5")
    data = json.loads(out)
    assert code == 0
    assert data["value"] == pytest.approx(3 / 8, abs=1e-9)
    assert data["distance"] == pytest.approx(0.1875, abs=1e-9)


def test_solve_self_diagonal(capsys, files):
    code, out, _ = run(capsys, "solve", files["big"], files["big"], "--method", "fw", "--init", "diagonal")
    assert code == 0 and json.loads(out)["value"] == 0.0


def test_solve_diagonal_init_mismatch(capsys, files):
    code, _, _ = run(capsys, "solve", files["x"], files["y"], "--init", "diagonal")
    assert code == 2


def test_solve_with_oracle(capsys, files):
    code, out, _ = run(capsys, "solve", files["x"], files["y"], "--oracle")
    data = json.loads(out)
    assert code == 0
    assert abs(data["oracle_gap"]) <= 1e-9
    assert data["oracle"]["method"] == "closed-form-1dof"


def test_solve_oracle_unavailable(capsys, files):
    code, _, _ = run(capsys, "solve", files["big"], files["big"], "--oracle")
    assert code == 4


def test_solve_entropic_and_trace(capsys, files):
    trace = files["dir"] / "trace.csv"
    code, out, _ = run(
        capsys, "solve", files["x"], files["y"], "--method", "entropic", "--epsilon", "10",
        "--trace", str(trace),
    )
    assert code == 0
    assert json.loads(out)["value"] == pytest.approx(0.5, rel=0.05)
    assert trace.read_text().splitlines()[0] == "iteration,value,gap"


def test_sweep_delta(capsys, files):
    out_path = files["dir"] / "sweep.csv"
    code, out, _ = run(capsys, "sweep-delta", "--out", str(out_path))
    assert code == 0
    lines = out_path.read_text().splitlines()
    assert lines[0] == "n,matrix_dim,negative_count,min_eigenvalue"
    assert len(lines) == 50
    for line in lines[1:]:
        n, dim, neg, _ = line.split(",")
        assert int(neg) == int(n) - 1 and int(dim) == 2 * int(n)
    assert json.loads(out)["rows"] == 49


def test_sweep_delta_single(capsys):
    code, out, _ = run(capsys, "sweep-delta", "--n-min", "2", "--n-max", "2")
    assert code == 0
    assert out.splitlines()[1].startswith("2,4,1,")


def test_sweep_delta_bad_range(capsys):
    code, _, _ = run(capsys, "sweep-delta", "--n-min", "5", "--n-max", "3")
    assert code == 2


def test_sweep_curves_small(capsys, files):
    cx, cy = files["dir"] / "cx.csv", files["dir"] / "cy.csv"
    assert run(capsys, "standin-curve", "--samples", "60", "--growth", "0.1", "--out", str(cx))[0] == 0
    assert run(capsys, "standin-curve", "--samples", "60", "--growth", "-0.1", "--out", str(cy))[0] == 0
    out_path = files["dir"] / "curves.csv"
    code, out, _ = run(
        capsys, "sweep-curves", str(cx), str(cy), "--m", "10", "--n-min", "3", "--n-max", "10",
        "--out", str(out_path),
    )
    assert code == 0
    meta = json.loads(out)
    assert meta["rows"] == 8 and "endpoints" in meta["sampling"]


def test_sweep_curves_insufficient(capsys, files):
    c = files["dir"] / "c.csv"
    run(capsys, "standin-curve", "--samples", "20", "--out", str(c))
    code, _, _ = run(capsys, "sweep-curves", str(c), str(c))
    assert code == 2


def test_qap_check(capsys, files):
    code, out, _ = run(capsys, "qap-check", files["x"], files["y"], "--trials", "100", "--seed", "3")
    assert code == 0 and json.loads(out)["failures"] == []
    code2, out2, _ = run(capsys, "qap-check", files["x"], files["y"], "--trials", "100", "--seed", "3")
    assert out == out2


def test_qap_check_one_point(capsys, files):
    assert run(capsys, "qap-check", files["one"], files["one"])[0] == 0


def test_qap_check_failure_exit_code(capsys, files, monkeypatch):
    from gwlab import experiments

    monkeypatch.setattr(experiments, "QAP_RTOL", -1.0)
    monkeypatch.setattr(
        experiments.qap_check, "__defaults__", (100, 0, -1.0)
    )
    code, _, err = run(capsys, "qap-check", files["x"], files["y"], "--trials", "3")
    assert code == 5 and "identity failed" in err


def test_console_script(files):
    out = subprocess.run(
        [sys.executable, "-m", "gwlab.cli", "spectrum", files["x"], files["y"]],
        capture_output=True,
        text=True,
    )
    assert out.returncode == 0
    assert json.loads(out.stdout)["negative_count"] == 1
