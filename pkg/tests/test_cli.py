import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from localize import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_coeffs_text(capsys):
    code, out, _ = run(capsys, "coeffs", "--d", "3", "--m", "2")
    assert code == 0
    assert "q_0 = -1/2 + (3/8)δ" in out
    assert "q_1 = 1 - (3/2)δ" in out
    assert "q_2 = 1" in out


def test_coeffs_d2_tables(capsys):
    _, out, _ = run(capsys, "coeffs", "--d", "2", "--m", "1")
    assert "Q_1 = 1" in out


def test_coeffs_delta(capsys):
    _, out, _ = run(capsys, "coeffs", "--d", "3", "--m", "1", "--delta", "0.75")
    assert "(-0.5, 1.0)" in out


def test_coeffs_json(capsys):
    _, out, _ = run(capsys, "coeffs", "--d", "2", "--m", "3", "--delta", "0.5", "--format", "json")
    doc = json.loads(out)
    assert doc["d"] == 2 and len(doc["q"]) == 4 and len(doc["values"]) == 4
    assert doc["s1"]["m"] == 3


def test_sample_csv(capsys):
    _, out, _ = run(capsys, "sample", "--family", "main", "--d", "3", "--m", "1", "--eps", "1", "--n", "40")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 40
    assert float(rows[0]["rho"]) == 0.0 and float(rows[0]["value"]) == 1.5
    vals = np.array([float(r["value"]) for r in rows])
    assert np.all(np.diff(vals) < 0)
    # 17 significant digits round-trip
    assert float(rows[5]["rho"]) == float(format(float(rows[5]["rho"]), ".17g"))


def test_sample_flat_json(capsys):
    _, out, _ = run(capsys, "sample", "--family", "flat", "--d", "2", "--m", "2", "--eps", "2",
                    "--n", "10", "--format", "json")
    doc = json.loads(out)
    assert len(doc["rows"]) == 10 and doc["rows"][0]["t"] is None
    assert doc["integral"] > 0


def test_charges(capsys):
    _, out, _ = run(capsys, "charges", "--d", "3", "--m", "1", "--eps", "1", "--t", "0.25")
    doc = json.loads(out)
    assert len(doc["terms"]) == 2 and "constant" in doc
    assert all(1 < t["a"] <= 2.0 for t in doc["terms"])


def test_charges_deviation_shrinks(capsys):
    devs = []
    for t in ("0.01", "0.005", "0.0025"):
        _, out, _ = run(capsys, "charges", "--d", "3", "--m", "2", "--eps", "0.5", "--t", t)
        devs.append(json.loads(out)["sup_deviation"])
    assert devs[0] > devs[1] > devs[2]


def test_integrate(capsys):
    _, out, _ = run(capsys, "integrate", "--family", "colzani", "--d", "3", "--m", "2", "--eps", "0.1")
    assert json.loads(out)["integral"] == pytest.approx(1.0, abs=1e-10)
    _, out, _ = run(capsys, "integrate", "--family", "flat", "--d", "3", "--m", "1", "--eps", "0.5",
                    "--format", "text")
    assert float(out) == pytest.approx(2 * np.pi, abs=1e-9)


def test_verify_filter(capsys, tmp_path):
    path = tmp_path / "report.json"
    code, _, err = run(capsys, "verify", "--filter", "table1", "--out", str(path))
    assert code == 0 and "1/1" in err
    doc = json.loads(path.read_text())
    assert doc[0]["id"] == "table1" and doc[0]["pass"] and doc[0]["seconds"] is None


def test_verify_seed_reproducible(capsys):
    _, a, _ = run(capsys, "verify", "--filter", "inversion", "--seed", "42")
    _, b, _ = run(capsys, "verify", "--filter", "inversion", "--seed", "42")
    assert a == b


def test_verify_unknown_filter(capsys):
    code, _, err = run(capsys, "verify", "--filter", "zzz")
    assert code == 1 and "zzz" in err


def test_verify_failure_exit_code(capsys, monkeypatch):
    from localize import verify as vf
    real = vf.run_suite

    def fake(prefix, seed):
        reps = real("table1", seed)
        reps[0].passed = False
        return reps
    monkeypatch.setattr(vf, "run_suite", fake)
    code, out, err = run(capsys, "verify")
    assert code == 1 and json.loads(out)[0]["pass"] is False and "FAIL" in err


@pytest.mark.parametrize("argv", [
    ["coeffs", "--d", "1", "--m", "2"],
    ["coeffs", "--d", "3", "--m", "0"],
    ["coeffs", "--d", "3", "--m", "2", "--delta", "1.0"],
    ["sample", "--eps", "1.5"],
    ["sample", "--family", "s1_second", "--d", "3"],
    ["sample", "--n", "1"],
    ["sample", "--format", "text"],
    ["charges", "--d", "3", "--m", "2", "--eps", "0.5", "--t", "0.3"],
    ["charges", "--accuracy", "0"],
    ["integrate", "--tol", "0"],
    ["integrate", "--eps", "nan"],
])
def test_usage_errors(capsys, monkeypatch, argv):
    # nothing numeric may run before validation
    monkeypatch.setattr(cli.qd, "normalize_kernel", lambda *a: pytest.fail("computed"))
    monkeypatch.setattr(cli.co, "solve_q", lambda *a: pytest.fail("computed"))
    with pytest.raises(SystemExit) as exc:
        cli.main(argv)
    assert exc.value.code == 2
    assert "error" in capsys.readouterr().err


def test_unwritable_output(capsys, tmp_path):
    with pytest.raises(SystemExit) as exc:
        cli.main(["coeffs", "--out", str(tmp_path / "missing" / "x.txt")])
    assert exc.value.code == 1
    assert "missing" in capsys.readouterr().err


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "localize", "coeffs", "--d", "3", "--m", "1"],
                         capture_output=True, text=True, check=True)
    assert "q_1 = 1" in res.stdout
