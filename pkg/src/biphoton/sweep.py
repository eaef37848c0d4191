"""Sweep orchestration: one SweepRecord per parameter tuple."""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, replace
from typing import Callable, Iterator

from .analysis import extrapolate_linear, fwhm_energy_window, schmidt_decompose
from .cavity import apply_cavity_transfer, compensate_phase, iter_cascade
from .config import SweepConfig
from .grid import FreqGrid, ResolutionError, SpectralAmplitude, total_energy
from .spectral import PhysParams, build_fb

# n_points value marking the a + b·x projection to zero grid spacing
EXTRAPOLATED = 0


@dataclass(frozen=True)
class SweepRecord:
    mode: str
    gamma3_tau: float
    gamma3N: float
    gammaC: float | None
    n_cavities: int
    half_range: float
    n_points: int
    n_points_signal: int | None
    S: float | None
    K: float | None
    fwhm: float | None
    energy_residual: float
    flag: str = ""
    walltime_s: float = 0.0

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "SweepRecord":
        return cls(**d)


@dataclass(frozen=True)
class _Point:
    kind: str
    tau: float
    gamma3N: float
    gammaC: float | None = None
    n_list: tuple[int, ...] = ()


def _grids(cfg: SweepConfig, n_points: int) -> tuple[FreqGrid, FreqGrid]:
    g = cfg.grid
    signal = g.signal_points if g.n_points_signal is not None else n_points
    return FreqGrid(g.half_range, signal), FreqGrid(g.half_range, n_points)


def _with_alias_retry(fn: Callable[[float | None], tuple], alias_tol: float) -> tuple:
    """Run ``fn(alias_tol)``; on a resolution error rerun unchecked and flag."""
    try:
        return fn(alias_tol) + ("",)
    except ResolutionError as e:
        return fn(None) + (f"resolution: {e}",)


def _fsc(f: SpectralAmplitude, gammaC: float | None, alias_tol):
    """Compressed amplitude and its energy residual (identity without cavity)."""
    if gammaC is None:
        return f, 0.0
    f_m = apply_cavity_transfer(f, gammaC)
    out = compensate_phase(f_m, alias_tol)
    return out.normalized(), abs(total_energy(out) / total_energy(f_m) - 1)


def _joint_point(cfg: SweepConfig, pt: _Point, n_points: int, want_s: bool) -> dict:
    t0 = time.perf_counter()
    grid_s, grid_i = _grids(cfg, n_points)
    p = PhysParams(pt.gamma3N, pt.tau, pt.gammaC)
    f_b = build_fb(p, grid_s, grid_i)
    f, residual, flag = _with_alias_retry(lambda tol: _fsc(f_b, pt.gammaC, tol), cfg.numerics.alias_tol)
    S = K = None
    if want_s:
        res = schmidt_decompose(f, cfg.numerics.max_modes)
        S, K = res.entropy, res.schmidt_number
    width = fwhm_energy_window(f.idler_at_zero_signal()).width
    return dict(
        n_points=n_points,
        n_points_signal=grid_s.n_points,
        S=S,
        K=K,
        fwhm=width,
        energy_residual=residual,
        flag=flag,
        walltime_s=time.perf_counter() - t0,
    )


def _base(cfg: SweepConfig, pt: _Point, **kw) -> dict:
    d = dict(
        mode=cfg.mode,
        gamma3_tau=pt.tau,
        gamma3N=pt.gamma3N,
        gammaC=pt.gammaC,
        n_cavities=0 if pt.gammaC is None else 1,
        half_range=cfg.grid.half_range,
    )
    d.update(kw)
    return d


def _flag_energy(rec: SweepRecord, tol: float) -> SweepRecord:
    if rec.energy_residual > tol:
        msg = f"energy residual {rec.energy_residual:.2e} > {tol:.1e}"
        return replace(rec, flag=f"{rec.flag}; {msg}" if rec.flag else msg)
    return rec


def _joint_records(cfg: SweepConfig, pt: _Point, base: dict | None = None) -> list[SweepRecord]:
    want_s = cfg.mode != "fig2_fwhm"
    base = _base(cfg, pt) if base is None else base
    rungs = sorted(cfg.grid.ladder) if (want_s and cfg.grid.ladder) else [cfg.grid.n_points]
    out = [SweepRecord(**base, **_joint_point(cfg, pt, n, want_s)) for n in rungs]
    if len(rungs) > 1:
        xs = [2 * cfg.grid.half_range / n for n in rungs]
        fit_s = extrapolate_linear(zip(xs, [r.S for r in out]))
        fit_k = extrapolate_linear(zip(xs, [r.K for r in out]))
        finest = out[-1]
        flags = "; ".join(sorted({r.flag for r in out if r.flag}))
        out.append(
            replace(
                finest,
                n_points=EXTRAPOLATED,
                S=fit_s.a,
                K=fit_k.a,
                energy_residual=max(r.energy_residual for r in out),
                flag=flags,
                walltime_s=0.0,
            )
        )
    return out


def _cascade_linewidths(cfg: SweepConfig, gamma3N: float, gammaC: float, n_list) -> list[tuple]:
    """(n, fwhm, energy residual, flag, walltime) for every n in n_list."""
    grid_i = FreqGrid(cfg.grid.half_range, cfg.grid.heralded_n_points)
    wanted = set(n_list)
    n_max = max(n_list)

    def run(tol):
        rows, worst = [], 0.0
        t0 = time.perf_counter()
        for stage in iter_cascade(gamma3N, gammaC, n_max, grid_i, tol):
            worst = max(worst, stage.energy_residual)
            if stage.n in wanted:
                width = fwhm_energy_window(stage.amplitude).width
                rows.append((stage.n, width, worst, time.perf_counter() - t0))
                t0 = time.perf_counter()
        return (rows,)

    rows, flag = _with_alias_retry(run, cfg.numerics.alias_tol)
    return [(n, w, r, flag, t) for n, w, r, t in rows]


def _cascade_records(cfg: SweepConfig, pt: _Point) -> list[SweepRecord]:
    out = []
    for n, width, resid, flag, wall in _cascade_linewidths(cfg, pt.gamma3N, pt.gammaC, pt.n_list):
        out.append(
            SweepRecord(
                mode=cfg.mode,
                gamma3_tau=0.0,
                gamma3N=pt.gamma3N,
                gammaC=pt.gammaC,
                n_cavities=n,
                half_range=cfg.grid.half_range,
                n_points=cfg.grid.heralded_n_points,
                n_points_signal=None,
                S=None,
                K=None,
                fwhm=width,
                energy_residual=resid,
                flag=flag,
                walltime_s=wall,
            )
        )
    return out


def _effective_records(cfg: SweepConfig, pt: _Point) -> list[SweepRecord]:
    """Joint amplitude whose idler linewidth is the n-cavity compressed FWHM."""
    eff = cfg.effective
    ((_, width, resid, flag, _),) = _cascade_linewidths(cfg, eff.gamma3N, pt.gammaC, [eff.n_cavities])
    inner = _Point("joint", pt.tau, width)
    base = _base(cfg, inner, gammaC=pt.gammaC, n_cavities=eff.n_cavities)
    recs = _joint_records(cfg, inner, base)
    out = []
    for r in recs:
        flags = "; ".join(x for x in (flag, r.flag) if x)
        out.append(replace(r, flag=flags, energy_residual=max(resid, r.energy_residual)))
    return out


def plan(cfg: SweepConfig) -> list[_Point]:
    """Ordered list of independent work items for ``cfg``."""
    if cfg.mode in ("fig2_entropy", "fig2_fwhm"):
        return [_Point("joint", tau, g, gc) for tau, g in cfg.pairs for gc in cfg.gammaC]
    if cfg.mode == "single_point":
        gcs = cfg.gammaC or (None,)
        return [_Point("joint", tau, g, gc) for tau, g in cfg.pairs for gc in gcs]
    if cfg.mode == "fig3_cascade":
        return [_Point("cascade", 0.0, g, gc, cfg.n_cavities) for g in cfg.gamma3N for gc in cfg.gammaC]
    if cfg.mode == "fig4_jsa":
        if cfg.effective is not None:
            eff = cfg.effective
            return [_Point("effective", tau, eff.gamma3N, gc) for tau in eff.tau for gc in eff.gammaC]
        return [_Point("joint", tau, g) for tau, g in cfg.pairs]
    raise ValueError(f"unknown mode {cfg.mode!r}")


def _evaluate(cfg: SweepConfig, pt: _Point) -> list[SweepRecord]:
    if pt.kind == "cascade":
        recs = _cascade_records(cfg, pt)
    elif pt.kind == "effective":
        recs = _effective_records(cfg, pt)
    else:
        recs = _joint_records(cfg, pt)
    return [_flag_energy(r, cfg.numerics.energy_tol) for r in recs]


def iter_sweep(cfg: SweepConfig, threads: int = 1) -> Iterator[SweepRecord]:
    """Yield records in plan order as they complete.

    Points run on a thread pool (numpy releases the GIL in FFT/SVD); the
    output order never depends on ``threads``.
    """
    points = plan(cfg)
    if threads <= 1:
        for pt in points:
            yield from _evaluate(cfg, pt)
        return
    with ThreadPoolExecutor(max_workers=threads) as pool:
        for recs in pool.map(lambda pt: _evaluate(cfg, pt), points):
            yield from recs


def run_sweep(cfg: SweepConfig, threads: int = 1) -> list[SweepRecord]:
    return list(iter_sweep(cfg, threads))


def is_finite_record(rec: SweepRecord) -> bool:
    vals = [rec.S, rec.K, rec.fwhm, rec.energy_residual]
    return all(v is None or math.isfinite(v) for v in vals)
