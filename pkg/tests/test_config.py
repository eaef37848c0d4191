import numpy as np
import pytest

from biphoton.config import PRESETS, ConfigError, load_config, parse_config, preset


def _base(**over):
    d = {"mode": "fig2_entropy", "params": {"pairs": [[0.25, 5.0]], "gammaC": [0.5, 1.0]}}
    d.update(over)
    return d


def test_presets_parse():
    for name in PRESETS:
        cfg = preset(name)
        assert cfg.grid.half_range == 300.0
    assert preset("fig2").pairs == ((0.25, 5.0), (0.25, 10.0), (0.5, 5.0))
    assert preset("fig3").n_cavities == (1, 3, 5, 7, 11, 20, 30)
    eff = preset("fig4").effective
    assert eff.n_cavities == 7 and eff.gammaC == (0.5, 1.0)
    with pytest.raises(ConfigError):
        preset("fig9")


def test_log_range():
    cfg = parse_config(_base(params={"pairs": [[0.25, 5]], "gammaC": {"log10_start": -1, "log10_stop": 1, "num": 3}}))
    assert np.allclose(cfg.gammaC, [0.1, 1.0, 10.0])


@pytest.mark.parametrize(
    "data, match",
    [
        (_base(extra=1), "unknown key"),
        (_base(grid={"n_point": 64}), "unknown key"),
        (_base(params={"pairs": [[0.25, 5]], "gammC": [1]}), "unknown key"),
        (_base(mode="fig5"), "mode"),
        (_base(params={"pairs": [[0.25, 5]]}), "requires params.gammaC"),
        (_base(params={"pairs": [[0.0, 5]], "gammaC": [1]}), "tau > 0"),
        (_base(params={"pairs": [[0.25, -5]], "gammaC": [1]}), "positive"),
        (_base(params={"pairs": [[0.25]], "gammaC": [1]}), "pairs"),
        (_base(params={"pairs": [[0.25, 5]], "gammaC": ["a"]}), "numbers"),
        (_base(params={"pairs": [[0.25, 5]], "gammaC": []}), "empty"),
        (_base(grid={"n_points": 8}), ">= 16"),
        (_base(grid={"ladder": [64, 64]}), "ladder"),
        (_base(grid={"n_points": 100.5}), "integers"),
        (_base(output={"format": "xml"}), "format"),
        ({"mode": "fig3_cascade", "params": {"gamma3N": [5], "gammaC": [1]}}, "n_cavities"),
        ({"mode": "fig4_jsa"}, "pairs or"),
        ({"mode": "fig4_jsa", "params": {"effective": {"tau": [0.25]}}}, "missing"),
    ],
)
def test_rejects(data, match):
    with pytest.raises(ConfigError, match=match):
        parse_config(data)


def test_load_toml(tmp_path):
    path = tmp_path / "sweep.toml"
    path.write_text(
        """
mode = "fig3_cascade"

[params]
gamma3N = [5.0]
gammaC = [1.0]
n_cavities = [1, 3]

[grid]
heralded_n_points = 4096

[numerics]
alias_tol = 1e-2

[output]
path = "out.json"
format = "json"
"""
    )
    cfg = load_config(path)
    assert cfg.mode == "fig3_cascade"
    assert cfg.grid.heralded_n_points == 4096
    assert cfg.numerics.alias_tol == 1e-2
    assert (cfg.output_path, cfg.output_format) == ("out.json", "json")


def test_bad_toml(tmp_path):
    path = tmp_path / "bad.toml"
    path.write_text("mode = \n")
    with pytest.raises(ConfigError):
        load_config(path)


def test_grid_override_drops_ladder():
    cfg = preset("fig4").with_grid_points(512)
    assert cfg.grid.n_points == 512 and cfg.grid.ladder == ()
    with pytest.raises(ConfigError):
        cfg.with_grid_points(4)
