import json
import subprocess
import sys

import pytest

from covario.cli import main


def write_body(tmp_path, name, spec):
    p = tmp_path / name
    p.write_text(json.dumps(spec))
    return str(p)


@pytest.fixture
def square_file(tmp_path):
    return write_body(tmp_path, "square.json",
                      {"kind": "polygon", "vertices": [[0, 0], [1, 0], [1, 1], [0, 1]]})


@pytest.fixture
def disk_file(tmp_path):
    return write_body(tmp_path, "disk.json", {"kind": "disk", "center": [0, 0], "radius": 1.0})


@pytest.fixture
def cw3_file(tmp_path):
    return write_body(tmp_path, "cw3.json",
                      {"kind": "support2d", "a0": 1.0, "coeffs": [[0, 0], [0, 0], [0.05, 0]]})


def test_body_validate_all_kinds(tmp_path, square_file, disk_file, cw3_file, capsys):
    zono = write_body(tmp_path, "z.json", {"kind": "zonogon", "center": [0, 0],
                                           "generators": [[[-1, 0], [1, 0]], [[0, -1], [0, 1]]]})
    for path in (square_file, disk_file, cw3_file, zono):
        assert main(["body-validate", "--body", path, "--json"]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["schema_version"] == 1 and out["valid"]


def test_malformed_json_reports_position(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"kind": "polygon",\n vertices: []}')
    assert main(["body-validate", "--body", str(bad)]) == 2
    err = capsys.readouterr().err
    assert "line 2" in err and "column" in err


def test_unknown_keys_rejected(tmp_path, capsys):
    path = write_body(tmp_path, "x.json",
                      {"kind": "disk", "center": [0, 0], "radius": 1.0, "colour": "red"})
    assert main(["body-validate", "--body", path]) == 2
    assert "unknown keys" in capsys.readouterr().err


def test_missing_file(capsys):
    assert main(["body-validate", "--body", "/nonexistent/body.json"]) == 2


def test_covariogram_grid_deterministic(tmp_path, square_file, capsys):
    out1, out2 = tmp_path / "g1.csv", tmp_path / "g2.csv"
    assert main(["covariogram", "--body", square_file, "--grid", "21x21",
                 "--out", str(out1), "--json"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert abs(rep["center_value"] - 1.0) < 1e-9
    assert main(["covariogram", "--body", square_file, "--grid", "21x21",
                 "--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    meta = json.loads((tmp_path / "g1.csv.meta.json").read_text())
    assert meta["schema_version"] == 1


def test_crosscov_command(tmp_path, square_file, disk_file, capsys):
    out = tmp_path / "x.csv"
    assert main(["crosscov", "--body", square_file, "--body2", disk_file,
                 "--grid", "11x11", "--out", str(out), "--json"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["method"] == "polyline-approx"
    assert out.exists()


def test_radon_command(tmp_path, cw3_file, capsys):
    out = tmp_path / "r.csv"
    assert main(["radon", "--body", cw3_file, "--u", "0.0", "--out", str(out),
                 "--json"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["method"] == "support-rootfind"
    lines = out.read_text().splitlines()
    assert lines[0] == "t,chord"
    assert len(lines) == 202


def test_flt_command(tmp_path, disk_file, capsys):
    out = tmp_path / "f.csv"
    assert main(["flt", "--body", disk_file, "--u", "0.0", "--num", "64",
                 "--out", str(out), "--json"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert abs(rep["value_at_zero"] - 3.141592653589793) < 1e-8


def test_zeros_command(tmp_path, disk_file, capsys):
    out = tmp_path / "z.csv"
    assert main(["zeros", "--body", disk_file, "--u", "0.0", "--m", "1..3",
                 "--out", str(out), "--json"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["n_branches"] == 3 and rep["all_validated"]
    rows = out.read_text().splitlines()
    assert rows[0].startswith("m,theta,re_zeta")
    assert len(rows) == 4


def test_kobayashi_command(tmp_path, disk_file, capsys):
    out = tmp_path / "k.json"
    assert main(["kobayashi", "--body", disk_file, "--m", "2..8", "--u-grid", "2",
                 "--out", str(out), "--json"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert -1.3 <= rep["decay_exponent"] <= -0.7
    assert json.loads(out.read_text())["schema_version"] == 1


def test_recover_curvature_command(tmp_path, disk_file, capsys):
    out = tmp_path / "c.csv"
    assert main(["recover-curvature", "--body", disk_file, "--u-grid", "2",
                 "--out", str(out), "--json"]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "theta,low,high,residual"
    low = float(lines[1].split(",")[1])
    assert abs(low - 1.0) < 0.02


def test_verify_exit_codes(capsys):
    assert main(["verify", "matrix-identities", "--json"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["schema_version"] == 1 and rep["passed"]


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "covario.cli", "verify",
                           "matrix-identities"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "PASS" in proc.stdout
