import json

import pytest

from biphoton.cli import main
from biphoton.export import read_csv, read_json

CONFIG = """
mode = "fig2_entropy"

[params]
pairs = [[0.25, 5.0]]
gammaC = [1.0, 2.0]

[grid]
n_points = 512
n_points_signal = 64
"""


@pytest.fixture
def config(tmp_path):
    p = tmp_path / "sweep.toml"
    p.write_text(CONFIG)
    return p


def test_run_to_csv_and_convert(tmp_path, config):
    out = tmp_path / "r.csv"
    assert main(["run", "--config", str(config), "--out", str(out)]) == 0
    recs = read_csv(out)
    assert len(recs) == 2
    js = tmp_path / "r.json"
    assert main(["export", "--in", str(out), "--out", str(js), "--format", "json"]) == 0
    assert read_json(js) == recs
    plots = tmp_path / "plots"
    assert main(["export", "--in", str(js), "--out", str(plots), "--format", "plotdata"]) == 0
    assert (plots / "fig2b_fwhm.csv").exists()


def test_run_to_stdout_json(config, capsys):
    assert main(["run", "--config", str(config), "--format", "json", "--threads", "2"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert len(doc["records"]) == 2


def test_grid_points_override(tmp_path, config):
    out = tmp_path / "r.csv"
    assert main(["run", "--config", str(config), "--grid-points", "256", "--out", str(out)]) == 0
    assert {r.n_points for r in read_csv(out)} == {256}


def test_strict_flagged(tmp_path, config):
    config.write_text(CONFIG.replace("n_points = 512", "n_points = 32").replace("gammaC = [1.0, 2.0]", "gammaC = [0.1]"))
    out = tmp_path / "r.csv"
    assert main(["run", "--config", str(config), "--out", str(out)]) == 0
    assert main(["run", "--config", str(config), "--out", str(out), "--strict"]) == 2
    assert read_csv(out)[0].flag


def test_config_errors(tmp_path, config, capsys):
    config.write_text(CONFIG + "\nbogus = 1\n")
    assert main(["run", "--config", str(config)]) == 1
    assert "bogus" in capsys.readouterr().err
    assert main(["figure", "fig3", "--threads", "0"]) == 1
    assert main(["figure", "fig3", "--format", "plotdata"]) == 1


def test_io_errors(tmp_path, config):
    blocker = tmp_path / "f"
    blocker.write_text("")
    assert main(["run", "--config", str(config), "--out", str(blocker / "x.csv")]) == 3
    assert main(["run", "--config", str(tmp_path / "missing.toml")]) == 3
    assert main(["export", "--in", str(tmp_path / "missing.csv"), "--out", "x", "--format", "csv"]) == 3


def test_figure_preset(tmp_path):
    out = tmp_path / "fig3"
    assert main(["figure", "fig3", "--format", "plotdata", "--out", str(out)]) == 0
    assert (out / "fig3_fwhm.csv").exists()


def test_check_subset(capsys):
    assert main(["check", "--only", "6"]) == 0
    assert capsys.readouterr().out.startswith("PASS [6]")


def test_usage_error_is_config_error():
    assert main(["figure", "fig9"]) == 1
    assert main(["run"]) == 1
    assert main(["--version"]) == 0
