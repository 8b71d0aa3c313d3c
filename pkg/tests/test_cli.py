import json

import pytest

from ctsf.cli import main, parse_grid
from ctsf.model import demo_scenario, load_scenario
from ctsf.multiplexing import correlation


def test_parse_grid():
    assert parse_grid("0:1.2:0.1") == [round(0.1 * i, 1) for i in range(13)]
    assert parse_grid("0:20:2") == list(range(0, 21, 2))
    assert parse_grid("1, 2,5") == [1.0, 2.0, 5.0]


def test_dump_config_roundtrip(tmp_path, capsys):
    assert main(["optimize", "--config", "demo", "--dump-config"]) == 0
    path = tmp_path / "c.json"
    path.write_text(capsys.readouterr().out)
    assert load_scenario(path) == demo_scenario()


def test_optimize_writes_result_and_manifest(tmp_path, capsys):
    out = tmp_path / "o"
    assert main(["optimize", "--config", "demo", "--out", str(out)]) == 0
    result = json.loads((out / "result.json").read_text())
    assert list(result) == ["objective_bits", "iterations", "converged", "xi", "powers",
                            "coefficients", "alpha_star"]
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["seed"] == demo_scenario().seed
    assert "time" not in json.dumps(manifest).lower()
    # refuses to overwrite, then overwrites with --force
    assert main(["optimize", "--config", "demo", "--out", str(out)]) == 2
    assert main(["optimize", "--config", "demo", "--out", str(out), "--force"]) == 0


def test_optimize_with_channel_file(tmp_path):
    ch = tmp_path / "ch.json"
    ch.write_text(json.dumps({"bob_gain": [2, 1, 2, 1], "eve_gain": [0.5, 1.5, 0.5, 1.5]}))
    out = tmp_path / "o"
    assert main(["optimize", "--config", "demo", "--channels", str(ch), "--out", str(out)]) == 0
    res = json.loads((out / "result.json").read_text())
    assert res["objective_bits"] > 0
    ch.write_text(json.dumps({"bob_gain": [1, 1], "eve_gain": [1, 1]}))
    assert main(["optimize", "--config", "demo", "--channels", str(ch), "--out", str(out), "--force"]) == 2


def test_infeasible_exit_code(tmp_path):
    code = main(["optimize", "--config", "demo", "--set", "deception_threshold=1e6",
                 "--out", str(tmp_path / "o")])
    assert code == 3


def test_config_errors_one_per_line(tmp_path, capsys):
    code = main(["optimize", "--config", "demo", "--set", "alpha=3", "--trials", "0",
                 "--out", str(tmp_path / "o")])
    assert code == 2
    err = capsys.readouterr().err.strip().splitlines()
    assert "alpha out of range" in err
    assert "trials must be a positive integer" in err
    assert main(["optimize", "--config", str(tmp_path / "none.json"), "--out", str(tmp_path)]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"num_bands": 4}')
    assert main(["sweep-power", "--config", str(bad), "--out", str(tmp_path / "s")]) == 2


def test_sweep_threshold_csv(tmp_path):
    out = tmp_path / "s"
    code = main(["sweep-threshold", "--config", "demo", "--trials", "3", "--grid", "0,0.5",
                 "--method", "bado", "--method", "ofdm", "--out", str(out)])
    assert code == 0
    lines = (out / "metrics.csv").read_text().splitlines()
    assert len(lines) == 5
    assert lines[1].split(",")[:2] == ["0", "bado"]
    assert lines[2].split(",")[:2] == ["0", "ofdm"]
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["grid"] == [0.0, 0.5]
    assert manifest["methods"] == ["bado", "ofdm"]


def test_sweep_power_grid_is_in_db(tmp_path):
    out = tmp_path / "s"
    assert main(["sweep-power", "--config", "demo", "--trials", "2", "--grid", "20",
                 "--method", "equal", "--out", str(out)]) == 0
    row = (out / "metrics.csv").read_text().splitlines()[1].split(",")
    # 20 dB is stored as the linear power 100
    assert row[:2] == ["100", "equal_power"]


def test_bad_grid(tmp_path):
    assert main(["sweep-threshold", "--config", "demo", "--grid", "0.5,0.1",
                 "--out", str(tmp_path / "s")]) == 2


def test_fit_alpha_prints_json(tmp_path, capsys):
    targets = ",".join(repr(correlation(0.5, i, 0, 4)) for i in range(4))
    assert main(["fit-alpha", "--targets", targets]) == 0
    res = json.loads(capsys.readouterr().out)
    assert set(res) == {"alpha_star", "residual", "iterations", "converged"}
    assert res["alpha_star"] == pytest.approx(0.5, abs=1e-6)
    f = tmp_path / "t.txt"
    f.write_text("1\n0\n0\n0\n")
    assert main(["fit-alpha", "--targets", str(f), "--alpha0", "0.9"]) == 0
    assert json.loads(capsys.readouterr().out)["alpha_star"] == pytest.approx(1.0, abs=1e-6)


def test_validate_passes(capsys):
    assert main(["validate"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert len(out) == 4 and all(line.startswith("PASS") for line in out)
