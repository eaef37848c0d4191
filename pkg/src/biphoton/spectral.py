"""Closed-form biphoton joint spectral amplitude from cascade emission."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import FreqGrid, SpectralAmplitude


@dataclass(frozen=True)
class PhysParams:
    """Dimensionless physical parameters (Γ₃ = 1).

    Attributes
    ----------
    gamma3N : float
        Superradiant idler decay rate, in units of Γ₃.
    tau : float
        Pump pulse duration in units of 1/Γ₃.  ``tau == 0`` is the heralded
        limit where the joint Gaussian factor is exactly 1.
    gammaC : float or None
        Cavity linewidth in units of Γ₃, ``None`` when no cavity is used.
    """

    gamma3N: float
    tau: float = 0.0
    gammaC: float | None = None

    def __post_init__(self):
        if not np.isfinite(self.gamma3N) or self.gamma3N <= 0:
            raise ValueError(f"gamma3N must be positive, got {self.gamma3N!r}")
        if not np.isfinite(self.tau) or self.tau < 0:
            raise ValueError(f"tau must be non-negative, got {self.tau!r}")
        if self.gammaC is not None and (not np.isfinite(self.gammaC) or self.gammaC <= 0):
            raise ValueError(f"gammaC must be positive, got {self.gammaC!r}")

    @property
    def heralded(self) -> bool:
        return self.tau == 0


def superradiant_rate(n_atoms: int, mu_bar: float) -> float:
    """Collective idler decay rate (N·μ̄ + 1) in units of Γ₃."""
    if int(n_atoms) != n_atoms or n_atoms < 1:
        raise ValueError(f"n_atoms must be a positive integer, got {n_atoms!r}")
    if not np.isfinite(mu_bar) or mu_bar < 0:
        raise ValueError(f"mu_bar must be non-negative, got {mu_bar!r}")
    return n_atoms * mu_bar + 1.0


def fb_values(p: PhysParams, ws, wi) -> np.ndarray:
    """Evaluate f_b at (broadcastable) signal/idler detunings, unnormalized.

    ``exp(-(ws + wi)² τ² / 8) / (Γ₃ᴺ/2 - i wi)``; the Gaussian factor is
    skipped entirely when ``tau == 0``.
    """
    ws = np.asarray(ws, dtype=float)
    wi = np.asarray(wi, dtype=float)
    lorentz = 1.0 / (p.gamma3N / 2 - 1j * wi)
    if p.heralded:
        return np.broadcast_to(lorentz, np.broadcast_shapes(ws.shape, wi.shape)).astype(complex)
    return np.exp(-((ws + wi) ** 2) * p.tau**2 / 8) * lorentz


def build_fb(p: PhysParams, grid_s: FreqGrid, grid_i: FreqGrid, normalize: bool = True) -> SpectralAmplitude:
    """Joint spectral amplitude on the (signal, idler) grid.

    With ``normalize`` (the default) the amplitude is scaled to unit total
    energy; the physical prefactor never enters the observables.
    """
    ws = grid_s.values[:, None]
    wi = grid_i.values[None, :]
    f = SpectralAmplitude(grid_i, fb_values(p, ws, wi), grid_s)
    return f.normalized() if normalize else f


def build_fb_idler_slice(p: PhysParams, grid_i: FreqGrid, normalize: bool = True) -> SpectralAmplitude:
    """The Δω_s = 0 row of :func:`build_fb` as a 1-D idler amplitude."""
    f = SpectralAmplitude(grid_i, fb_values(p, 0.0, grid_i.values))
    return f.normalized() if normalize else f


def heralded_lorentzian(gamma3N: float, grid_i: FreqGrid, normalize: bool = True) -> SpectralAmplitude:
    """Heralded (τ = 0) idler amplitude 1/(Γ₃ᴺ/2 - i Δω_i)."""
    return build_fb_idler_slice(PhysParams(gamma3N), grid_i, normalize)
