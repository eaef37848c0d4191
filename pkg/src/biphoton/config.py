"""Sweep configuration: TOML schema, validation and the figure presets.

Schema (every key outside this list is rejected)::

    mode = "fig2_entropy"     # fig2_entropy | fig2_fwhm | fig3_cascade | fig4_jsa | single_point

    [params]
    pairs = [[0.25, 5.0]]     # (Γ₃τ, Γ₃ᴺ/Γ₃) pairs; fig2_*, fig4_jsa, single_point
    gammaC = [0.5, 1.0]       # list, or {log10_start, log10_stop, num}
    gamma3N = [5.0]           # fig3_cascade
    n_cavities = [1, 3, 5, 7] # fig3_cascade

    [params.effective]        # fig4_jsa alternative to pairs: linewidth from a cascade
    tau = [0.25]
    gamma3N = 5.0
    gammaC = [0.5, 1.0]
    n_cavities = 7

    [grid]
    half_range = 300.0
    n_points = 2048           # idler axis
    n_points_signal = 2048    # defaults to n_points
    ladder = [2048, 4096]     # optional idler n_points ladder for a+b·x extrapolation
    heralded_n_points = 65536 # 1-D cascades

    [numerics]
    alias_tol = 1e-3
    energy_tol = 1e-8
    max_modes = 50

    [output]
    path = "results.csv"
    format = "csv"            # csv | json | plotdata
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field, replace

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

MODES = ("fig2_entropy", "fig2_fwhm", "fig3_cascade", "fig4_jsa", "single_point")
FORMATS = ("csv", "json", "plotdata")


class ConfigError(ValueError):
    """Invalid or inconsistent sweep configuration."""


@dataclass(frozen=True)
class EffectiveLinewidth:
    tau: tuple[float, ...]
    gamma3N: float
    gammaC: tuple[float, ...]
    n_cavities: int


@dataclass(frozen=True)
class GridSpec:
    half_range: float = 300.0
    n_points: int = 2048
    n_points_signal: int | None = None
    ladder: tuple[int, ...] = ()
    heralded_n_points: int = 65536

    @property
    def signal_points(self) -> int:
        return self.n_points if self.n_points_signal is None else self.n_points_signal


@dataclass(frozen=True)
class Numerics:
    alias_tol: float = 1e-3
    energy_tol: float = 1e-8
    max_modes: int = 50


@dataclass(frozen=True)
class SweepConfig:
    mode: str
    pairs: tuple[tuple[float, float], ...] = ()
    gammaC: tuple[float, ...] = ()
    gamma3N: tuple[float, ...] = ()
    n_cavities: tuple[int, ...] = ()
    effective: EffectiveLinewidth | None = None
    grid: GridSpec = field(default_factory=GridSpec)
    numerics: Numerics = field(default_factory=Numerics)
    output_path: str | None = None
    output_format: str = "csv"

    def with_grid_points(self, n_points: int) -> "SweepConfig":
        """Single fixed idler grid size (drops any extrapolation ladder)."""
        if n_points < 16:
            raise ConfigError("grid points must be >= 16")
        return replace(self, grid=replace(self.grid, n_points=n_points, ladder=()))


def _check_keys(section: dict, allowed, where: str):
    unknown = sorted(set(section) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {', '.join(unknown)}")


def _positive_list(value, name: str, integer: bool = False) -> tuple:
    if isinstance(value, dict):
        _check_keys(value, ("log10_start", "log10_stop", "num"), name)
        try:
            value = np.logspace(value["log10_start"], value["log10_stop"], int(value["num"])).tolist()
        except KeyError as e:
            raise ConfigError(f"{name} range needs log10_start, log10_stop and num") from e
    if not isinstance(value, (list, tuple)):
        value = [value]
    if not value:
        raise ConfigError(f"{name} must not be empty")
    out = []
    for v in value:
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigError(f"{name} entries must be numbers, got {v!r}")
        if integer and int(v) != v:
            raise ConfigError(f"{name} entries must be integers, got {v!r}")
        if not np.isfinite(v) or v <= 0:
            raise ConfigError(f"{name} entries must be positive, got {v!r}")
        out.append(int(v) if integer else float(v))
    return tuple(out)


def _pairs(value) -> tuple[tuple[float, float], ...]:
    if not isinstance(value, list) or not value:
        raise ConfigError("params.pairs must be a non-empty list of [tau, gamma3N]")
    out = []
    for pair in value:
        if not isinstance(pair, list) or len(pair) != 2:
            raise ConfigError(f"params.pairs entry must be [tau, gamma3N], got {pair!r}")
        tau, g = pair
        if not isinstance(tau, (int, float)) or tau < 0:
            raise ConfigError(f"tau must be non-negative, got {tau!r}")
        (g,) = _positive_list([g], "gamma3N")
        out.append((float(tau), g))
    return tuple(out)


def parse_config(data: dict) -> SweepConfig:
    """Validate a config mapping (as loaded from TOML) into a SweepConfig."""
    _check_keys(data, ("mode", "params", "grid", "numerics", "output"), "top level")
    mode = data.get("mode")
    if mode not in MODES:
        raise ConfigError(f"mode must be one of {', '.join(MODES)}, got {mode!r}")

    params = data.get("params", {})
    _check_keys(params, ("pairs", "gammaC", "gamma3N", "n_cavities", "effective"), "[params]")
    kw: dict = {"mode": mode}
    if "pairs" in params:
        kw["pairs"] = _pairs(params["pairs"])
    if "gammaC" in params:
        kw["gammaC"] = _positive_list(params["gammaC"], "gammaC")
    if "gamma3N" in params:
        kw["gamma3N"] = _positive_list(params["gamma3N"], "gamma3N")
    if "n_cavities" in params:
        kw["n_cavities"] = _positive_list(params["n_cavities"], "n_cavities", integer=True)
    if "effective" in params:
        eff = params["effective"]
        _check_keys(eff, ("tau", "gamma3N", "gammaC", "n_cavities"), "[params.effective]")
        try:
            kw["effective"] = EffectiveLinewidth(
                tau=_positive_list(eff["tau"], "effective.tau"),
                gamma3N=_positive_list(eff["gamma3N"], "effective.gamma3N")[0],
                gammaC=_positive_list(eff["gammaC"], "effective.gammaC"),
                n_cavities=_positive_list(eff["n_cavities"], "effective.n_cavities", integer=True)[0],
            )
        except KeyError as e:
            raise ConfigError(f"[params.effective] is missing {e.args[0]}") from e

    grid = data.get("grid", {})
    _check_keys(grid, ("half_range", "n_points", "n_points_signal", "ladder", "heralded_n_points"), "[grid]")
    gkw = {}
    if "half_range" in grid:
        gkw["half_range"] = _positive_list(grid["half_range"], "half_range")[0]
    for key in ("n_points", "n_points_signal", "heralded_n_points"):
        if key in grid:
            gkw[key] = _positive_list(grid[key], key, integer=True)[0]
    if "ladder" in grid:
        gkw["ladder"] = _positive_list(grid["ladder"], "ladder", integer=True)
        if len(set(gkw["ladder"])) < 2:
            raise ConfigError("grid.ladder needs at least two distinct sizes")
    kw["grid"] = GridSpec(**gkw)
    for key in ("n_points", "heralded_n_points"):
        if getattr(kw["grid"], key) < 16:
            raise ConfigError(f"grid.{key} must be >= 16")

    numerics = data.get("numerics", {})
    _check_keys(numerics, ("alias_tol", "energy_tol", "max_modes"), "[numerics]")
    nkw = {}
    for key in ("alias_tol", "energy_tol"):
        if key in numerics:
            nkw[key] = _positive_list(numerics[key], key)[0]
    if "max_modes" in numerics:
        nkw["max_modes"] = _positive_list(numerics["max_modes"], "max_modes", integer=True)[0]
    kw["numerics"] = Numerics(**nkw)

    output = data.get("output", {})
    _check_keys(output, ("path", "format"), "[output]")
    if "path" in output:
        kw["output_path"] = str(output["path"])
    fmt = output.get("format", "csv")
    if fmt not in FORMATS:
        raise ConfigError(f"output.format must be one of {', '.join(FORMATS)}, got {fmt!r}")
    kw["output_format"] = fmt

    cfg = SweepConfig(**kw)
    _check_mode(cfg)
    return cfg


def _check_mode(cfg: SweepConfig):
    need = {
        "fig2_entropy": ("pairs", "gammaC"),
        "fig2_fwhm": ("pairs", "gammaC"),
        "fig3_cascade": ("gamma3N", "gammaC", "n_cavities"),
        "single_point": ("pairs",),
    }.get(cfg.mode, ())
    missing = [k for k in need if not getattr(cfg, k)]
    if missing:
        raise ConfigError(f"mode {cfg.mode} requires params.{', params.'.join(missing)}")
    if cfg.mode == "fig4_jsa" and not cfg.pairs and cfg.effective is None:
        raise ConfigError("mode fig4_jsa requires params.pairs or [params.effective]")
    if cfg.mode.startswith("fig2") and any(tau == 0 for tau, _ in cfg.pairs):
        raise ConfigError("fig2 modes need tau > 0 (use fig3_cascade for the heralded case)")


def load_config(path) -> SweepConfig:
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"{path}: {e}") from e
    return parse_config(data)


FIG2_PAIRS = [[0.25, 5.0], [0.25, 10.0], [0.5, 5.0]]

PRESETS = {
    "fig2": {
        "mode": "fig2_entropy",
        "params": {
            "pairs": FIG2_PAIRS,
            "gammaC": {"log10_start": -1.0, "log10_stop": 2.0, "num": 25},
        },
        "grid": {"half_range": 300.0, "n_points": 8192, "n_points_signal": 256},
    },
    "fig3": {
        "mode": "fig3_cascade",
        "params": {
            "gamma3N": [5.0],
            "gammaC": [0.5, 1.0],
            "n_cavities": [1, 3, 5, 7, 11, 20, 30],
        },
        "grid": {"half_range": 300.0, "heralded_n_points": 65536},
    },
    "fig4": {
        "mode": "fig4_jsa",
        "params": {
            "effective": {"tau": [0.25], "gamma3N": 5.0, "gammaC": [0.5, 1.0], "n_cavities": 7},
        },
        "grid": {
            "half_range": 300.0,
            "n_points": 16384,
            "n_points_signal": 256,
            "ladder": [8192, 12288, 16384],
            "heralded_n_points": 65536,
        },
    },
}


def preset(name: str) -> SweepConfig:
    try:
        return parse_config(PRESETS[name])
    except KeyError:
        raise ConfigError(f"unknown figure preset {name!r}; choose from {', '.join(PRESETS)}") from None
