"""Uniform frequency/time lattices and the unitary transforms between them.

Units: frequencies in Γ₃, times in 1/Γ₃.  Frequency samples follow the
periodic (DFT-native) convention: ``spacing = 2 * half_range / n_points``
and sample ``k`` sits at ``(k - n_points // 2) * spacing``.  For even
``n_points`` this is ``-half_range + k * spacing``; in every case detuning
0 is sampled exactly at index ``n_points // 2``.

Frequency -> time uses the kernel ``exp(-i w t)`` so that a causal decay
``exp(-G t / 2) Θ(t)`` maps to the Lorentzian ``1 / (G/2 - i w)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

MIN_POINTS = 16


class ResolutionError(RuntimeError):
    """Raised when a grid cannot faithfully represent an amplitude."""


@dataclass(frozen=True)
class FreqGrid:
    half_range: float
    n_points: int

    def __post_init__(self):
        if not np.isfinite(self.half_range) or self.half_range <= 0:
            raise ValueError(f"half_range must be positive, got {self.half_range!r}")
        if int(self.n_points) != self.n_points or self.n_points < MIN_POINTS:
            raise ValueError(f"n_points must be an integer >= {MIN_POINTS}, got {self.n_points!r}")
        object.__setattr__(self, "n_points", int(self.n_points))
        object.__setattr__(self, "half_range", float(self.half_range))

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_range / self.n_points

    @cached_property
    def values(self) -> np.ndarray:
        w = (np.arange(self.n_points) - self.n_points // 2) * self.spacing
        w.flags.writeable = False
        return w

    @property
    def zero_index(self) -> int:
        return self.n_points // 2


@dataclass(frozen=True)
class TimeGrid:
    n_points: int
    spacing: float

    @cached_property
    def values(self) -> np.ndarray:
        t = (np.arange(self.n_points) - self.n_points // 2) * self.spacing
        t.flags.writeable = False
        return t

    @property
    def span(self) -> float:
        return self.n_points * self.spacing


def make_freq_grid(half_range: float, n_points: int) -> FreqGrid:
    """Symmetric periodic frequency grid spanning [-half_range, half_range)."""
    return FreqGrid(half_range, n_points)


def dual_time_grid(g: FreqGrid) -> TimeGrid:
    """Time lattice paired with ``g``: ``dt * dw * n == 2π``."""
    return TimeGrid(g.n_points, 2.0 * np.pi / (g.n_points * g.spacing))


def _frozen(values: np.ndarray) -> np.ndarray:
    arr = np.array(values, dtype=complex, copy=True)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class SpectralAmplitude:
    """Complex amplitude on a 1-D idler grid or a 2-D (signal, idler) grid.

    For 2-D amplitudes axis 0 is the signal detuning and axis 1 the idler
    detuning.
    """

    grid_i: FreqGrid
    values: np.ndarray = field(repr=False)
    grid_s: FreqGrid | None = None

    def __post_init__(self):
        arr = _frozen(self.values)
        expected = self.shape_for(self.grid_s, self.grid_i)
        if arr.shape != expected:
            raise ValueError(f"values shape {arr.shape} does not match grids {expected}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("amplitude contains non-finite entries")
        object.__setattr__(self, "values", arr)

    @staticmethod
    def shape_for(grid_s, grid_i):
        if grid_s is None:
            return (grid_i.n_points,)
        return (grid_s.n_points, grid_i.n_points)

    @property
    def ndim(self) -> int:
        return self.values.ndim

    @property
    def grids(self) -> tuple[FreqGrid, ...]:
        return (self.grid_i,) if self.grid_s is None else (self.grid_s, self.grid_i)

    @property
    def measure(self) -> float:
        return float(np.prod([g.spacing for g in self.grids]))

    def with_values(self, values: np.ndarray) -> "SpectralAmplitude":
        return SpectralAmplitude(self.grid_i, values, self.grid_s)

    def normalized(self) -> "SpectralAmplitude":
        e = total_energy(self)
        if e <= 0:
            raise ValueError("cannot normalize a zero-energy amplitude")
        return self.with_values(self.values / np.sqrt(e))

    def idler_at_zero_signal(self) -> "SpectralAmplitude":
        """1-D idler amplitude along Δω_s = 0 (identity for 1-D input)."""
        if self.grid_s is None:
            return self
        return SpectralAmplitude(self.grid_i, self.values[self.grid_s.zero_index])


@dataclass(frozen=True, eq=False)
class TemporalAmplitude:
    """Time-domain image of a :class:`SpectralAmplitude`.

    Samples are scaled so that ``Σ|ψ|² dt`` equals the spectral energy.
    """

    grid_i: TimeGrid
    values: np.ndarray = field(repr=False)
    grid_s: TimeGrid | None = None

    def __post_init__(self):
        arr = _frozen(self.values)
        if not np.all(np.isfinite(arr)):
            raise ValueError("temporal amplitude contains non-finite entries")
        object.__setattr__(self, "values", arr)

    @property
    def grids(self) -> tuple[TimeGrid, ...]:
        return (self.grid_i,) if self.grid_s is None else (self.grid_s, self.grid_i)

    @property
    def measure(self) -> float:
        return float(np.prod([g.spacing for g in self.grids]))


def total_energy(f) -> float:
    """Σ|value|² times the grid cell measure (works for spectral or temporal)."""
    return float(np.sum(np.abs(f.values) ** 2) * f.measure)


def _scale(freq_grids) -> float:
    # unitary DFT preserves Σ|x|²; rescale so energies agree with their measures
    return float(np.prod([np.sqrt(g.spacing / dual_time_grid(g).spacing) for g in freq_grids]))


def fft_to_time(values: np.ndarray, axes=None) -> np.ndarray:
    """Centered unitary transform with kernel exp(-i w t) (raw arrays)."""
    shifted = np.fft.ifftshift(values, axes=axes)
    return np.fft.fftshift(np.fft.fftn(shifted, axes=axes, norm="ortho"), axes=axes)


def fft_to_freq(values: np.ndarray, axes=None) -> np.ndarray:
    """Inverse of :func:`fft_to_time`."""
    shifted = np.fft.ifftshift(values, axes=axes)
    return np.fft.fftshift(np.fft.ifftn(shifted, axes=axes, norm="ortho"), axes=axes)


def to_time(f: SpectralAmplitude) -> TemporalAmplitude:
    psi = fft_to_time(f.values) * _scale(f.grids)
    grid_s = None if f.grid_s is None else dual_time_grid(f.grid_s)
    return TemporalAmplitude(dual_time_grid(f.grid_i), psi, grid_s)


def to_freq(psi: TemporalAmplitude, like: SpectralAmplitude) -> SpectralAmplitude:
    """Transform back onto the frequency grids of ``like``."""
    return like.with_values(fft_to_freq(psi.values) / _scale(like.grids))
