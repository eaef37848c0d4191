import numpy as np
import pytest
from scipy import integrate

from biphoton.grid import (
    FreqGrid,
    SpectralAmplitude,
    TemporalAmplitude,
    TimeGrid,
    dual_time_grid,
    fft_to_freq,
    fft_to_time,
    make_freq_grid,
    to_freq,
    to_time,
    total_energy,
)


def test_window_and_spacing():
    g = make_freq_grid(300, 2048)
    assert g.values[0] == -300.0
    assert g.values[-1] == pytest.approx(300 - g.spacing)
    assert FreqGrid(1, 16).spacing == 0.125


@pytest.mark.parametrize("n", [16, 17, 33, 2048])
def test_zero_detuning_sampled_exactly(n):
    g = FreqGrid(5.0, n)
    assert g.values[g.zero_index] == 0.0
    assert np.allclose(np.diff(g.values), g.spacing)


@pytest.mark.parametrize("half, n", [(0, 64), (-1, 64), (np.inf, 64), (1, 8), (1, 16.5)])
def test_invalid_grid(half, n):
    with pytest.raises(ValueError):
        FreqGrid(half, n)


def test_values_read_only():
    g = FreqGrid(1, 16)
    with pytest.raises(ValueError):
        g.values[0] = 1.0


@pytest.mark.parametrize(
    "spacing, n, dt",
    [(2 * np.pi / 64, 64, 1.0), (0.1, 1000, 2 * np.pi / 100)],
)
def test_dual_grid(spacing, n, dt):
    g = FreqGrid(spacing * n / 2, n)
    t = dual_time_grid(g)
    assert isinstance(t, TimeGrid)
    assert t.spacing == pytest.approx(dt, rel=1e-12)
    assert t.spacing * g.spacing * n == pytest.approx(2 * np.pi)


def test_energy_examples():
    g = FreqGrid(8, 16)  # unit spacing
    assert total_energy(SpectralAmplitude(g, np.zeros(16))) == 0
    one = np.zeros(16, dtype=complex)
    one[3] = 1j
    assert total_energy(SpectralAmplitude(g, one)) == 1.0


def test_lorentzian_energy_against_quadrature():
    g = FreqGrid(300, 8192)
    f = SpectralAmplitude(g, 1 / (0.5 - 1j * g.values))
    ref, _ = integrate.quad(lambda w: 1 / (0.25 + w * w), -300, 300, limit=500, points=[0])
    assert total_energy(f) == pytest.approx(ref, rel=1e-3)


def test_round_trip_and_parseval(rng):
    gs, gi = FreqGrid(40, 64), FreqGrid(40, 96)
    vals = rng.normal(size=(64, 96)) + 1j * rng.normal(size=(64, 96))
    f = SpectralAmplitude(gi, vals, gs)
    psi = to_time(f)
    assert isinstance(psi, TemporalAmplitude)
    assert total_energy(psi) == pytest.approx(total_energy(f), rel=1e-12)
    back = to_freq(psi, f)
    assert np.linalg.norm(back.values - vals) / np.linalg.norm(vals) < 1e-10
    raw = fft_to_freq(fft_to_time(vals))
    assert np.linalg.norm(raw - vals) / np.linalg.norm(vals) < 1e-10


def test_causal_decay_convention():
    # exp(-G t/2) Θ(t) <-> 1/(G/2 - i w)
    G = 2.0
    g = FreqGrid(400, 2**15)
    psi = to_time(SpectralAmplitude(g, 1 / (G / 2 - 1j * g.values)))
    t = psi.grid_i.values
    mag = np.abs(psi.values)
    scale = mag[np.argmin(np.abs(t - 1.0))] / np.exp(-G / 2)
    later = np.argmin(np.abs(t - 2.0))
    assert mag[later] / scale == pytest.approx(np.exp(-G), rel=1e-2)
    early = np.argmin(np.abs(t + 1.0))
    assert mag[early] / scale < 1e-2


def test_amplitude_validation():
    g = FreqGrid(1, 16)
    with pytest.raises(ValueError):
        SpectralAmplitude(g, np.ones(15))
    with pytest.raises(ValueError):
        SpectralAmplitude(g, np.full(16, np.nan))
    with pytest.raises(ValueError):
        SpectralAmplitude(g, np.zeros(16)).normalized()
    f = SpectralAmplitude(g, np.ones(16))
    assert total_energy(f.normalized()) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        f.values[0] = 2


def test_idler_at_zero_signal():
    gs, gi = FreqGrid(4, 16), FreqGrid(4, 32)
    vals = np.arange(16 * 32).reshape(16, 32).astype(complex)
    f = SpectralAmplitude(gi, vals, gs)
    assert np.array_equal(f.idler_at_zero_signal().values, vals[8])
    assert f.ndim == 2 and f.measure == gs.spacing * gi.spacing
