"""Tests for the command-line front end: exit codes, determinism, config."""

import json
import subprocess
import sys

import pytest

from ultrana.cli import main


def run_cli(args):
    return main(list(args))


def test_bootstrap_ratio_exit_zero(tmp_path):
    out = tmp_path / "sweep.csv"
    code = run_cli(["bootstrap-ratio", "--c0", "1", "--kappa", "2",
                    "--nmax", "64", "--output", str(out)])
    assert code == 0
    header = out.read_text().splitlines()[0]
    assert header == "kappa,C0,n,ratio"


def test_bootstrap_ratio_rejects_kappa_below_one(capsys):
    code = run_cli(["bootstrap-ratio", "--c0", "1", "--kappa", "0.5",
                    "--nmax", "64"])
    assert code == 2


def test_csv_byte_identical_across_runs(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["bootstrap-ratio", "--c0", "1,2", "--kappa", "2", "--nmax", "48"]
    assert run_cli(args + ["--output", str(a)]) == 0
    assert run_cli(args + ["--output", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_sharp_falsify_lambda_json(tmp_path):
    out = tmp_path / "falsify.json"
    code = run_cli(["sharp", "--c0", "1", "--falsify", "lambda",
                    "--lambda", "2", "--C", "5", "--nmax", "100",
                    "--output", str(out)])
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["violating_n"] == 31
    assert doc["target"] == "lambda_bound"
    assert "metadata" in doc


def test_sharp_falsify_kappa_requires_unit_interval():
    code = run_cli(["sharp", "--c0", "1", "--falsify", "kappa",
                    "--kappa", "1.5", "--C", "1", "--nmax", "50"])
    assert code == 2


def test_config_file_with_flag_override(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"nmax": 32, "c0_list": ["1"],
                               "kappa_list": ["2"], "format": "csv"}))
    out = tmp_path / "o.csv"
    # flag --nmax 48 overrides the config's 32
    code = run_cli(["--config", str(cfg), "bootstrap-ratio",
                    "--nmax", "48", "--output", str(out)])
    assert code == 0
    rows = out.read_text().splitlines()[1:]
    assert any(r.split(",")[2] == "48" for r in rows)
    assert not any(r.split(",")[2] == "32" for r in rows)


def test_config_file_invalid_json(tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text("{not json")
    assert run_cli(["--config", str(cfg), "bootstrap-ratio"]) == 2


def test_propagate_csv_columns(tmp_path):
    out = tmp_path / "prop.csv"
    code = run_cli(["propagate", "--c0", "1", "--cp", "2", "--N", "20",
                    "--kappa", "2", "--output", str(out)])
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "n,log_b_n,implied_C_n,envelope_margin"
    assert len(lines) == 21   # header + n = 1..20


def test_fit_k_prints_value(capsys):
    code = run_cli(["fit-k", "--c0", "1", "--cp", "2", "--N", "30",
                    "--kappa", "2"])
    assert code == 0
    assert "fitted K" in capsys.readouterr().out


def test_multiindex_exit_zero(tmp_path):
    code = run_cli(["multiindex", "--dmax", "2", "--order-max", "4",
                    "--cases", "5"])
    assert code == 0


def test_kernel_mass_command():
    code = run_cli(["kernel", "--s", "2", "--d", "1", "--check", "mass"])
    assert code == 0


def test_holder_command(tmp_path):
    out = tmp_path / "holder.csv"
    code = run_cli(["holder", "--c0", "1", "--beta-max", "3", "--kmax", "2",
                    "--grid", "256", "--output", str(out)])
    assert code == 0
    assert out.read_text().splitlines()[0] == "k_or_beta,estimate,bound,ratio"


def test_majorant_check_monotonicity():
    code = run_cli(["majorant", "--check", "monotonicity", "--n", "500"])
    assert code == 0


def test_acceptance_only_multiindex(tmp_path):
    out = tmp_path / "acc.json"
    code = run_cli(["acceptance", "--only", "multiindex", "--output", str(out)])
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["all_passed"] is True
    assert len(doc["criteria"]) == 1


def test_no_command_prints_help():
    assert run_cli([]) == 2


def test_console_script_installed():
    proc = subprocess.run([sys.executable, "-m", "ultrana.cli", "--help"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "ultrana" in proc.stdout


def test_env_precision_override(tmp_path, monkeypatch):
    monkeypatch.setenv("ULTRANA_PRECISION", "128")
    out = tmp_path / "e.csv"
    code = run_cli(["bootstrap-ratio", "--c0", "1", "--kappa", "2",
                    "--nmax", "16", "--output", str(out)])
    assert code == 0


def test_env_precision_too_low(monkeypatch):
    monkeypatch.setenv("ULTRANA_PRECISION", "32")
    assert run_cli(["bootstrap-ratio", "--c0", "1", "--kappa", "2",
                    "--nmax", "16"]) == 2
