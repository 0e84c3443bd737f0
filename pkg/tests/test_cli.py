import json

import numpy as np
import pytest

from hexbands.cli import fmt, read_csv, run


def _run(tmp_path, *args):
    out = tmp_path / "out"
    code = run(list(args) + ["--out", str(out)])
    return code, out


def test_bands_csv(tmp_path):
    code, out = _run(tmp_path, "bands", "--potential", "zero", "--lmin", "0", "--lmax", "100")
    assert code == 0
    meta, header, rows = read_csv(out)
    assert header == ["kind", "lo", "hi", "width"]
    assert any("kappa_inv=0.0" in m for m in meta)
    touch = [float(r[1]) for r in rows if r[0] == "touching"]
    assert np.allclose(touch, [np.pi**2 * k * k for k in (1, 2, 3)], atol=1e-8)
    assert not [r for r in rows if r[0] == "gap"]


def test_bands_json_mirrors_report(tmp_path):
    code, out = _run(tmp_path, "bands", "--mass", "3", "--lmin", "0", "--lmax", "50", "--format", "json")
    assert code == 0
    blob = json.loads(out.read_text())
    assert blob["gaps"] and {"lo", "hi", "width"} == set(blob["gaps"][0])
    assert blob["params"] == {"a": 1.0, "kappa_inv": 0.0, "mass": 3.0}


def test_smap_grid(tmp_path):
    code, out = _run(tmp_path, "smap", "--grid", "201")
    assert code == 0
    _, header, rows = read_csv(out)
    S = np.array([[float(v) for v in r[1:]] for r in rows])
    assert S.shape == (201, 201) and len(header) == 202
    assert S[100, 100] == 3.0 == S.max()


def test_delta_curve(tmp_path):
    code, out = _run(tmp_path, "delta", "--lmin", "0", "--lmax", "10", "--grid", "100")
    assert code == 0
    _, header, rows = read_csv(out)
    assert header == ["lambda", "t1", "t2", "delta", "inside_band"]
    assert all(len(r) == 5 for r in rows)
    assert float(rows[0][3]) == 1.0 and rows[0][4] == "true"
    # inside a gap of the m = 3 free operator
    code, out = _run(tmp_path, "delta", "--mass", "3", "--lmin", "3", "--lmax", "3.5", "--grid", "100")
    _, _, rows = read_csv(out)
    assert rows[0][4] == "false"


def test_surface_dirac_eigenvalues(tmp_path):
    common = ["--kappa-inv", "0.5", "--mass", "1", "--lmin", "0", "--lmax", "40", "--grid", "2000"]
    code, out = _run(tmp_path, "surface", *common, "--theta-grid", "3", "--levels", "3")
    assert code == 0
    _, header, rows = read_csv(out)
    assert header[-1] == "lambda" and len(rows) == 27
    code, out = _run(tmp_path, "dirac", *common)
    _, _, rows = read_csv(out)
    assert rows and all(abs(float(r[3])) < 1e-9 for r in rows)
    code, out = _run(tmp_path, "eigenvalues", *common)
    _, header, rows = read_csv(out)
    assert rows and all(r[3] == "true" and r[4] for r in rows)


def test_deterministic_output(tmp_path):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    for path in (a, b):
        assert run(["surface", "--theta-grid", "3", "--levels", "2", "--lmax", "30", "--out", str(path)]) == 0
    assert a.read_text() == b.read_text()


def test_round_trip_exact(tmp_path):
    code, out = _run(tmp_path, "delta", "--kappa-inv", "0.3", "--lmin", "-3", "--lmax", "7", "--grid", "100")
    _, _, rows = read_csv(out)
    lams = np.linspace(-3, 7, 101)
    assert [float(r[0]) for r in rows] == lams.tolist()
    for x in (0.1, 1 / 3, np.pi, 1e-300, -2.5e17):
        assert float(fmt(x)) == x


def test_exit_codes(tmp_path, capsys):
    assert run(["bands", "--a", "-1"]) == 2
    assert run(["bands", "--lmin", "5", "--lmax", "1"]) == 2
    assert run(["frobnicate"]) == 2
    assert run(["bands", "--potential", "file:/nonexistent/q.txt"]) == 2
    assert run(["bands", "--grid", "3"]) == 2
    assert run(["smap", "--out", str(tmp_path / "no" / "dir" / "x.csv")]) == 2
    capsys.readouterr()


def test_asymmetric_file_rejected(tmp_path):
    q = tmp_path / "q.txt"
    x = np.linspace(0, 1, 11)
    np.savetxt(q, np.column_stack([x, x]))
    assert run(["bands", "--potential", f"file:{q}"]) == 2


def test_verify(capsys):
    assert run(["verify", "--kappa-inv", "0.5", "--mass", "1", "--potential", "cosine:2"]) == 0
    out = capsys.readouterr().out
    assert "d1d0_identity" in out and "FAIL" not in out
