import json
import math
import subprocess
import sys

import pytest

from qrabi.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_partition_zero_coupling_csv(capsys):
    code, out, _ = run(capsys, "partition", "--g", "0", "--delta", "0.4", "--beta", "0.5,1")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].startswith("beta,Z")
    for line, beta in zip(lines[1:], (0.5, 1.0)):
        z = float(line.split(",")[1])
        assert z == pytest.approx(2 * math.cosh(0.4 * beta) / (1 - math.exp(-beta)), rel=1e-12)


def test_rb_json_exact_coefficients(capsys):
    code, out, _ = run(capsys, "rb", "--k", "1", "--format", "json", "--deterministic")
    assert code == 0
    doc = json.loads(out)
    assert doc["params"]["polynomial"] == "tau - g2 - 1/2"
    coeffs = {(r["tau_pow"], r["g2_pow"], r["D_pow"]): r["coefficient"] for r in doc["results"]}
    assert coeffs[(0, 0, 0)] == "-1/2"
    assert set(doc) >= {"command", "params", "numerics", "results", "error_estimates", "runtime_ms", "version"}


def test_deterministic_output_is_byte_identical(capsys):
    argv = ("gfunc", "--kind", "G", "--x", "0.2:2.8:4", "--format", "json", "--deterministic")
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert a == b
    assert json.loads(a)["runtime_ms"] is None


def test_exit_codes(capsys):
    code, _, err = run(capsys, "partition", "--beta", "-1")
    assert code == 3 and err.startswith("error:domain:")
    code, _, _ = run(capsys, "partition", "--beta", "1:2")
    assert code == 2
    code, _, _ = run(capsys, "gfunc", "--kind", "G", "--x", "1.0")
    assert code == 3
    code, out, _ = run(capsys, "--version")
    assert code == 0 and out.startswith("qrabi ")


def test_out_and_meta_files(tmp_path, capsys):
    out = tmp_path / "k.csv"
    code, _, _ = run(capsys, "gfunc", "--kind", "constraint", "--N", "1", "2",
                     "--g", "0.3", "--delta", "0.8", "--out", str(out))
    assert code == 0
    rows = out.read_text().strip().splitlines()
    assert len(rows) == 3
    assert abs(float(rows[1].split(",")[1])) < 1e-14
    meta = json.loads((tmp_path / "k.csv.meta.json").read_text())
    assert meta["command"] == "gfunc"


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"model": {"g": 0.0, "delta": 0.4}, "output": {"format": "json"}}))
    code, out, _ = run(capsys, "partition", "--beta", "1", "--config", str(cfg), "--deterministic")
    assert code == 0
    assert json.loads(out)["params"]["g"] == 0.0


def test_console_script_entry_point():
    res = subprocess.run([sys.executable, "-m", "qrabi.cli", "eigs", "--parity", "minus", "--window", "0", "3",
                          "--g", "0.3", "--delta", "0.8"], capture_output=True, text=True)
    assert res.returncode == 0, res.stderr
    assert "Juddian" in res.stdout
