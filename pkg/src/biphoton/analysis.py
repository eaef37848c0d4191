"""Entanglement and linewidth metrics for spectral amplitudes."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .grid import SpectralAmplitude, total_energy

NEGATIVE_TOL = 1e-12
SUM_TOL = 1e-6
RETAINED_WEIGHT = 1 - 1e-6


@dataclass(frozen=True, eq=False)
class SchmidtResult:
    """Schmidt weights and modes of a normalized joint amplitude.

    ``eigenvalues`` holds the full (untruncated) spectrum; the mode arrays
    keep only the leading modes, one mode per row, normalized so that
    ``Σ|ψ_n|² dω = 1`` on the grid.
    """

    eigenvalues: np.ndarray
    entropy: float
    schmidt_number: float
    modes_signal: np.ndarray = field(repr=False)
    modes_idler: np.ndarray = field(repr=False)

    @property
    def n_modes(self) -> int:
        return self.modes_signal.shape[0]


def _checked(eigenvalues) -> np.ndarray:
    lam = np.asarray(eigenvalues, dtype=float).ravel()
    if lam.size == 0:
        raise ValueError("no eigenvalues given")
    if np.any(lam < -NEGATIVE_TOL):
        raise ValueError(f"negative eigenvalue {lam.min():.3e}")
    lam = np.clip(lam, 0.0, None)
    if abs(lam.sum() - 1) > SUM_TOL:
        raise ValueError(f"eigenvalues sum to {lam.sum():.12g}, expected 1")
    return lam


def entropy(eigenvalues) -> float:
    """Entanglement entropy -Σ λ log₂ λ in bits (0 log 0 = 0)."""
    lam = _checked(eigenvalues)
    nz = lam[lam > 0]
    return float(max(0.0, -np.sum(nz * np.log2(nz))))


def schmidt_number(eigenvalues) -> float:
    """Effective number of Schmidt modes 1/Σ λ²."""
    lam = _checked(eigenvalues)
    return float(1.0 / np.sum(lam**2))


def _weighted_matrix(f: SpectralAmplitude) -> np.ndarray:
    if f.grid_s is None:
        raise ValueError("Schmidt decomposition needs a 2-D amplitude")
    if total_energy(f) <= 0:
        raise ValueError("Schmidt decomposition of a zero-energy amplitude")
    return f.values * np.sqrt(f.measure)


def schmidt_decompose(f: SpectralAmplitude, max_modes: int = 50) -> SchmidtResult:
    """Schmidt decomposition through one SVD of the measure-weighted matrix.

    λ_n = σ_n² / Σσ². Modes are kept until their cumulative weight reaches
    1 - 1e-6 or ``max_modes``; entropy and Schmidt number always use the
    full singular spectrum.
    """
    if max_modes < 1:
        raise ValueError("max_modes must be >= 1")
    a = _weighted_matrix(f)
    u, s, vh = np.linalg.svd(a, full_matrices=False)
    lam = s**2 / np.sum(s**2)
    keep = int(np.searchsorted(np.cumsum(lam), RETAINED_WEIGHT) + 1)
    keep = min(keep, max_modes, lam.size)
    modes_s = u[:, :keep].T / np.sqrt(f.grid_s.spacing)
    modes_i = vh[:keep] / np.sqrt(f.grid_i.spacing)
    return SchmidtResult(lam, entropy(lam), schmidt_number(lam), modes_s, modes_i)


def kernel_eigenvalues(f: SpectralAmplitude, which: str = "signal") -> np.ndarray:
    """Eigenvalues of the discretized one-photon correlation kernel.

    ``which="signal"`` builds K₁(ω, ω') = ∫ f(ω, ω₁) f*(ω', ω₁) dω₁,
    ``which="idler"`` builds K₂(ω, ω') = ∫ f(ω₂, ω) f*(ω₂, ω') dω₂.  Both are
    assembled by explicit quadrature and diagonalized as Hermitian operators
    with the grid measure.  Intended as an independent check of
    :func:`schmidt_decompose` on small grids.
    """
    if f.grid_s is None:
        raise ValueError("kernel eigenvalues need a 2-D amplitude")
    vals = f.values / np.sqrt(total_energy(f))
    ds, di = f.grid_s.spacing, f.grid_i.spacing
    if which == "signal":
        kernel = np.einsum("aj,bj->ab", vals, vals.conj()) * di
        op = kernel * ds
    elif which == "idler":
        kernel = np.einsum("ja,jb->ab", vals, vals.conj()) * ds
        op = kernel * di
    else:
        raise ValueError(f"which must be 'signal' or 'idler', got {which!r}")
    lam = np.linalg.eigvalsh(op)[::-1]
    return np.clip(lam, 0.0, None)


class FwhmEstimate(NamedTuple):
    width: float
    window_lo: float
    window_hi: float
    energy_fraction: float


def fwhm_energy_window(f: SpectralAmplitude, fraction: float = 0.5) -> FwhmEstimate:
    """Smallest contiguous window holding ``fraction`` of the spectral energy.

    Every sample is a cell of one grid spacing, so the width is the number
    of samples in the window times the spacing.  Among equally narrow
    windows the one centred closest to the energy centroid wins.
    """
    if f.ndim != 1:
        raise ValueError("fwhm_energy_window needs a 1-D amplitude")
    e = np.abs(f.values) ** 2
    total = e.sum()
    if total <= 0:
        raise ValueError("zero-energy amplitude has no width")
    c = np.concatenate(([0.0], np.cumsum(e / total)))
    target = fraction * (1 - 1e-12)
    starts = np.arange(e.size)
    ends = np.searchsorted(c, c[:-1] + target, side="left")
    valid = ends <= e.size
    starts, ends = starts[valid], ends[valid]
    counts = ends - starts
    best = counts.min()
    cand = np.flatnonzero(counts == best)
    w = f.grid_i.values
    d = f.grid_i.spacing
    centroid = np.sum(w * e) / total
    centres = (w[starts[cand]] + w[ends[cand] - 1]) / 2
    k = cand[np.argmin(np.abs(centres - centroid))]
    i, j = starts[k], ends[k]
    return FwhmEstimate(float(best * d), float(w[i] - d / 2), float(w[j - 1] + d / 2), float(c[j] - c[i]))


class LinearFit(NamedTuple):
    a: float
    b: float
    max_residual: float
    max_deviation: float


def extrapolate_linear(points) -> LinearFit:
    """Least-squares fit y = a + b·x over (x, y) pairs.

    ``a`` is the projection to zero grid spacing.  ``max_residual`` is the
    largest |y - (a + b x)| / |a + b x|; ``max_deviation`` the largest
    |y - a| / |a|, i.e. how far each sampled value sits from the projection.
    """
    pts = np.asarray(list(points), dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 2 or pts.shape[1] != 2:
        raise ValueError("need at least two (x, y) points")
    x, y = pts[:, 0], pts[:, 1]
    if np.ptp(x) == 0:
        raise ValueError("x values must not all be equal")
    design = np.column_stack([np.ones_like(x), x])
    (a, b), *_ = np.linalg.lstsq(design, y, rcond=None)
    fitted = a + b * x
    with np.errstate(divide="ignore", invalid="ignore"):
        resid = np.abs(y - fitted) / np.abs(fitted)
        dev = np.abs(y - a) / abs(a)
    return LinearFit(float(a), float(b), float(np.max(resid)), float(np.max(dev)))
