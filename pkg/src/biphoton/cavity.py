"""Cavity transfer, temporal phase compensation and multi-cavity cascades."""

from __future__ import annotations

from collections.abc import Iterator, Sequence
from typing import NamedTuple

import numpy as np

from .grid import (
    FreqGrid,
    ResolutionError,
    SpectralAmplitude,
    fft_to_freq,
    fft_to_time,
    total_energy,
)
from .spectral import PhysParams, build_fb, heralded_lorentzian

# largest tolerated |ψ| at the periodic time boundary, relative to the peak
DEFAULT_ALIAS_TOL = 1e-3
# relative |Γ₃ᴺ - Γ_c| below which the degenerate closed form is used
DEGENERATE_RTOL = 1e-6


def transfer_function(wi, gammaC: float) -> np.ndarray:
    """Lossless single-port cavity response -(Γ_c + 2iΔ)/(Γ_c - 2iΔ)."""
    if not np.isfinite(gammaC) or gammaC <= 0:
        raise ValueError(f"gammaC must be positive, got {gammaC!r}")
    wi = np.asarray(wi, dtype=float)
    return -(gammaC + 2j * wi) / (gammaC - 2j * wi)


def apply_cavity_transfer(f: SpectralAmplitude, gammaC: float) -> SpectralAmplitude:
    """Multiply ``f`` by the cavity response along its idler axis."""
    return f.with_values(f.values * transfer_function(f.grid_i.values, gammaC))


def time_tail_ratio(psi: np.ndarray, axes: Sequence[int] | None = None) -> float:
    """Largest |ψ| on the periodic boundary of the time window over its peak.

    A large value means the temporal wavepacket has not decayed before
    wrapping around, i.e. the frequency spacing is too coarse.
    """
    mag = np.abs(psi)
    peak = mag.max()
    if peak == 0:
        return 0.0
    axes = range(mag.ndim) if axes is None else axes
    edge = 0.0
    for ax in axes:
        edge = max(edge, np.take(mag, 0, axis=ax).max(), np.take(mag, -1, axis=ax).max())
    return float(edge / peak)


def compensate_phase(
    f: SpectralAmplitude,
    alias_tol: float | None = DEFAULT_ALIAS_TOL,
    idler_only: bool = False,
) -> SpectralAmplitude:
    """Remove all temporal phase: F[|F⁻¹[f]|].

    Parameters
    ----------
    f : SpectralAmplitude
        1-D or 2-D amplitude.
    alias_tol : float or None
        Raise :class:`ResolutionError` when the time-domain image at the
        window boundary exceeds this fraction of its peak.  ``None``
        disables the check.
    idler_only : bool
        Transform only the idler axis of a 2-D amplitude.  Kept for
        sensitivity comparisons; the joint transform is the default.
    """
    axes = (f.ndim - 1,) if idler_only else tuple(range(f.ndim))
    psi = fft_to_time(f.values, axes=axes)
    if alias_tol is not None:
        ratio = time_tail_ratio(psi, axes)
        if ratio > alias_tol:
            raise ResolutionError(
                f"time-domain tail {ratio:.2e} of peak exceeds {alias_tol:.1e}; "
                "increase n_points (finer frequency spacing) to lengthen the time window"
            )
    return f.with_values(fft_to_freq(np.abs(psi), axes=axes))


def single_cavity_fsc(
    p: PhysParams,
    grid_s: FreqGrid,
    grid_i: FreqGrid,
    alias_tol: float | None = DEFAULT_ALIAS_TOL,
    idler_only: bool = False,
) -> SpectralAmplitude:
    """Compressed joint amplitude f_sc for one cavity (unit energy)."""
    if p.gammaC is None:
        raise ValueError("PhysParams.gammaC is required for a cavity")
    f_m = apply_cavity_transfer(build_fb(p, grid_s, grid_i), p.gammaC)
    return compensate_phase(f_m, alias_tol, idler_only).normalized()


def analytic_temporal(p: PhysParams, ts, ti, heralded: bool | None = None) -> np.ndarray:
    """Closed-form F⁻¹[f_m](t_s, t_i) for a Lorentzian idler behind one cavity.

    With ``heralded`` (default: ``p.tau == 0``) the Gaussian prefactor is
    replaced by 1, so the value at Δt = 0 is exactly 1.  Θ(0) is taken as 1.
    """
    if p.gammaC is None:
        raise ValueError("PhysParams.gammaC is required")
    if heralded is None:
        heralded = p.heralded
    ts = np.asarray(ts, dtype=float)
    ti = np.asarray(ti, dtype=float)
    g, gc = p.gamma3N, p.gammaC
    dt = ti - ts
    causal = dt >= 0
    dtp = np.where(causal, dt, 0.0)
    if abs(g - gc) < DEGENERATE_RTOL * g:
        shape = np.exp(-g * dtp / 2) * (1 - g * dtp)
    else:
        shape = ((g + gc) * np.exp(-g * dtp / 2) - 2 * gc * np.exp(-gc * dtp / 2)) / (g - gc)
    shape = np.where(causal, shape, 0.0)
    if heralded:
        return shape.astype(complex)
    if p.tau == 0:
        raise ValueError("the pulsed form needs tau > 0")
    pref = 2 * np.sqrt(2 * np.pi) / p.tau * np.exp(-2 * ts**2 / p.tau**2)
    return (pref * shape).astype(complex)


def phase_jump_time(p: PhysParams) -> float:
    """Delay t_i - t_s where the temporal wavepacket changes sign."""
    if p.gammaC is None:
        raise ValueError("PhysParams.gammaC is required")
    g, gc = p.gamma3N, p.gammaC
    if abs(g - gc) < DEGENERATE_RTOL * g:
        return 1.0 / g
    return float(2 * np.log((g + gc) / (2 * gc)) / (g - gc))


class CascadeStage(NamedTuple):
    n: int
    amplitude: SpectralAmplitude
    energy_residual: float


def iter_cascade(
    gamma3N: float,
    gammaC: float | Sequence[float],
    n: int,
    grid_i: FreqGrid,
    alias_tol: float | None = DEFAULT_ALIAS_TOL,
) -> Iterator[CascadeStage]:
    """Yield the heralded idler after each of ``n`` cavities.

    ``gammaC`` is either one linewidth for every stage or one per stage.
    Each yielded amplitude has unit energy.
    """
    if int(n) != n or n < 0:
        raise ValueError(f"n must be a non-negative integer, got {n!r}")
    if n == 0:
        linewidths = []
    elif np.isscalar(gammaC):
        linewidths = [float(gammaC)] * n
    else:
        linewidths = [float(g) for g in gammaC]
    if len(linewidths) != n:
        raise ValueError(f"expected {n} per-stage linewidths, got {len(linewidths)}")
    f = heralded_lorentzian(gamma3N, grid_i)
    for k, gc in enumerate(linewidths, start=1):
        f_m = apply_cavity_transfer(f, gc)
        out = compensate_phase(f_m, alias_tol)
        e_in, e_out = total_energy(f_m), total_energy(out)
        f = out.normalized()
        yield CascadeStage(k, f, abs(e_out / e_in - 1))


def cascade_cavities(
    p: PhysParams,
    n: int,
    grid_i: FreqGrid,
    alias_tol: float | None = DEFAULT_ALIAS_TOL,
    stage_gammaC: Sequence[float] | None = None,
) -> SpectralAmplitude:
    """Heralded idler after ``n`` cavities (n = 0 gives the bare Lorentzian).

    The signal photon is traced out by heralding, so ``p.tau`` is ignored.
    ``stage_gammaC`` overrides the uniform ``p.gammaC`` per stage.
    """
    if stage_gammaC is None:
        if p.gammaC is None and n > 0:
            raise ValueError("PhysParams.gammaC is required for a cascade")
        gammaC = p.gammaC
    else:
        gammaC = stage_gammaC
    f = heralded_lorentzian(p.gamma3N, grid_i)
    for stage in iter_cascade(p.gamma3N, gammaC, n, grid_i, alias_tol):
        f = stage.amplitude
    return f
