import csv
import io
import json
import subprocess
import sys

import pytest

from ramansim.cli import format_number, main, reformat_csv


def write_config(tmp_path, cfg, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return str(path)


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_run_preset_json(capsys):
    code, out, _ = run_cli(capsys, "run", "--c-g", "0.6", "--c-e", "0.8")
    assert code == 0
    data = json.loads(out)
    assert data["fidelity_to_target"] >= 0.999999
    assert data["effective"]["t"] == pytest.approx(15.707963267948966)
    assert "t" in data["defaulted"] and "n_max" in data["defaulted"]
    assert "c_g" not in data["defaulted"]


def test_run_outcome_flag_overrides_config(tmp_path, capsys):
    cfg = write_config(tmp_path, {"c_g": 0.6, "c_e": [0, 0.8], "outcome": "g", "alpha": 3})
    _, out, _ = run_cli(capsys, "run", "--config", cfg)
    assert json.loads(out)["outcome"] == "g"
    _, out, _ = run_cli(capsys, "run", "--config", cfg, "--outcome", "e")
    data = json.loads(out)
    assert data["outcome"] == "e"
    assert data["fidelity_to_target"] >= 0.999999


def test_run_with_full_model(capsys):
    _, out, _ = run_cli(capsys, "run", "--alpha", "2", "--with-full-model")
    data = json.loads(out)
    assert 0 < data["model_infidelity"] < 1e-3


def test_run_csv(capsys):
    code, out, _ = run_cli(capsys, "run", "--format", "csv", "--precision", "6")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 1
    assert float(rows[0]["margin1"]) == pytest.approx(138.889, rel=1e-5)


def test_missing_config_exit_2(capsys):
    code, _, err = run_cli(capsys, "run", "--config", "/no/such/file.json")
    assert code == 2
    assert json.loads(err)["error"] == "config"


def test_unknown_key_rejected(tmp_path, capsys):
    cfg = write_config(tmp_path, {"alpha": 3, "colour": "blue"})
    code, _, err = run_cli(capsys, "run", "--config", cfg)
    assert code == 2
    assert "colour" in json.loads(err)["message"]


def test_numerical_error_exit_3(capsys):
    code, _, err = run_cli(capsys, "run", "--alpha", "3", "--n-max", "5")
    assert code == 3
    assert json.loads(err)["error"] == "truncation"
    code, _, err = run_cli(capsys, "run", "--alpha", "0.05")
    assert code == 3
    assert json.loads(err)["error"] == "ill_conditioned_basis"


def test_nmax_cap(monkeypatch, capsys):
    monkeypatch.setenv("RAMANSIM_NMAX_CAP", "20")
    code, _, err = run_cli(capsys, "run", "--alpha", "3")
    assert code == 2
    assert "RAMANSIM_NMAX_CAP" in json.loads(err)["message"]


def test_sweep_csv(tmp_path, capsys):
    cfg = write_config(tmp_path, {"grid": {"alpha": [5, 2, 3]}, "c_g": 0.6, "c_e": 0.8})
    code, out, _ = run_cli(capsys, "sweep", "--config", cfg)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [r["alpha"] for r in rows] == ["2.00e+00", "3.00e+00", "5.00e+00"]
    fid = [float(r["fidelity_to_target"]) for r in rows]
    assert fid == sorted(fid)
    assert rows[2]["overlap"] == "1.93e-22"
    assert reformat_csv(out, 3) == out


def test_sweep_duplicates_warn(tmp_path, capsys):
    cfg = write_config(tmp_path, {"grid": {"alpha": [2, 2, 3]}})
    code, out, err = run_cli(capsys, "sweep", "--config", cfg)
    assert code == 0
    assert len(out.strip().splitlines()) == 3
    assert "duplicate" in err


def test_sweep_needs_grid(capsys):
    code, _, _ = run_cli(capsys, "sweep")
    assert code == 2


def test_sweep_deterministic_file(tmp_path, capsys):
    cfg = write_config(
        tmp_path,
        {"grid": {"alpha": [2, 3], "delta": [1e3, 1e4]}, "metrics": ["fidelity_to_target", "gate_error", "margins"],
         "output": {"precision": 8}},
    )
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["sweep", "--config", cfg, "--out", str(a)]) == 0
    assert main(["sweep", "--config", cfg, "--out", str(b), "--workers", "2"]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert reformat_csv(a.read_text(), 8) == a.read_text()


def test_validate_margins(capsys):
    code, out, _ = run_cli(capsys, "validate", "--alpha", "3", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["margin1"] == pytest.approx(138.9, rel=1e-3)
    assert data["margin2"] == pytest.approx(58.95, rel=1e-3)
    assert data["t_defaulted"] is True
    code, out, _ = run_cli(capsys, "validate", "--alpha", "3")
    assert "margin1=138.9" in out and "margin2=58.95" in out


def test_validate_zero_time(capsys):
    code, _, err = run_cli(capsys, "validate", "--t", "0")
    assert code == 2
    assert json.loads(err)["error"] == "validation"


def test_feasibility_text(capsys):
    code, out, _ = run_cli(capsys, "feasibility")
    assert code == 0
    assert "alpha=10, log10_overlap=-86.86" in out
    for a in ("alpha=2,", "alpha=3,", "alpha=5,", "alpha=10,"):
        assert a in out
    assert "feasible" in out and "NOT" not in out


def test_feasibility_json(capsys):
    _, out, _ = run_cli(capsys, "feasibility", "--format", "json")
    data = json.loads(out)
    assert [r["overlap_order"] for r in data["rows"]] == [-4, -8, -22, -87]
    assert data["preset"]["quality_factor"] == 1e11


def test_presets_module_entry():
    proc = subprocess.run([sys.executable, "-m", "ramansim", "presets"], capture_output=True, text=True, check=True)
    data = json.loads(proc.stdout)
    assert data["lambda_coupling"] == 10.0 and data["delta"] == 1e3
    assert data["cavity_lifetime"] == 0.1 and data["hadamard_gate_time"] == 0.01
    assert data["alphas"] == [2.0, 3.0, 5.0, 10.0]


def test_format_number():
    assert format_number(1.9287498479639178e-22) == "1.93e-22"
    assert format_number(float("inf")) == "inf"
    assert format_number(None) == ""
    assert format_number(True) == "true"
