import math

import pytest

from floqspin.cli import main


def run_cli(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_point_key_value_output(capsys):
    code, out, err = run_cli(["point", "--system.h_z1", "40"], capsys)
    assert code == 0
    values = dict(line.split(" = ") for line in out.strip().splitlines())
    assert float(values["p1"]) > float(values["p0"])
    assert float(values["gap"]) == pytest.approx(
        float(values["eps1"]) - float(values["eps0"]))


def test_point_json_output(capsys):
    import json

    code, out, _ = run_cli(["point", "--json", "--system.h_z1", "0",
                            "--system.theta", str(math.pi / 4)], capsys)
    assert code == 0
    payload = json.loads(out)
    assert payload["p1"] / payload["p0"] == pytest.approx(
        math.exp(-1.0 / 3.0), abs=1e-6)


def test_config_file_with_flag_override(tmp_path, capsys):
    config = tmp_path / "run.ini"
    config.write_text(
        "[system]\nh_z1 = 96.2\ntheta = 0.0\n"
        "[bath]\ntemperature = 3.0\n"
        "[sweep]\nn_steps = 1024\n")
    code, out, _ = run_cli(["point", "--config", str(config),
                            "--system.theta", "1.5707963267948966"], capsys)
    assert code == 0
    values = dict(line.split(" = ") for line in out.strip().splitlines())
    assert float(values["h_z1"]) == 96.2
    assert float(values["theta"]) == pytest.approx(math.pi / 2)


def test_sweep_writes_csv_and_sidecar(tmp_path, capsys):
    out_csv = tmp_path / "scan.csv"
    code, out, _ = run_cli(
        ["sweep", "--out", str(out_csv), "--workers", "1",
         "--sweep.axis1_start", "20", "--sweep.axis1_stop", "80",
         "--sweep.axis1_points", "9", "--sweep.n_steps", "1024"], capsys)
    assert code == 0
    text = out_csv.read_text()
    assert text.splitlines()[0].startswith("h_z1,theta,eps0")
    assert len(text.splitlines()) == 10
    meta = (tmp_path / "scan.csv.meta.txt").read_text()
    assert "sweep.axis1_points=9" in meta


def test_spectrum_fast_path(tmp_path, capsys):
    out_csv = tmp_path / "spectrum.csv"
    code, _, _ = run_cli(
        ["spectrum", "--out", str(out_csv), "--workers", "1",
         "--sweep.axis1_points", "5", "--sweep.axis1_stop", "100",
         "--sweep.n_steps", "1024"], capsys)
    assert code == 0
    header = out_csv.read_text().splitlines()[0]
    assert "eps0" in header and "p0" not in header


def test_analytic_dump(capsys):
    code, out, _ = run_cli(["analytic", "--system.h_z1", "96.2"], capsys)
    assert code == 0
    values = dict(line.split(" = ", 1) for line in out.strip().splitlines())
    assert float(values["cdt_root.1"]) == pytest.approx(2.404825557695773)
    assert "ratio_jump.magnitude" in values
    assert float(values["z"]) == pytest.approx(96.2 / 40.0)


def test_machine_readable_error_line(tmp_path, capsys):
    config = tmp_path / "bad.ini"
    config.write_text("[system]\nnot_a_key = 1\n")
    code, _, err = run_cli(["point", "--config", str(config)], capsys)
    assert code == 2
    assert err.startswith("floqspin-error code=ConfigError")


def test_missing_config_file(capsys):
    code, _, err = run_cli(["point", "--config", "/nonexistent.ini"], capsys)
    assert code == 2
    assert "floqspin-error" in err


def test_validate_subset(capsys):
    code, out, _ = run_cli(["validate", "--only", "1"], capsys)
    assert code == 0
    assert out.splitlines()[0].startswith("PASS   1")
