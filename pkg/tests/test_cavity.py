import numpy as np
import pytest
from scipy import optimize

from biphoton.analysis import fwhm_energy_window
from biphoton.cavity import (
    analytic_temporal,
    apply_cavity_transfer,
    cascade_cavities,
    compensate_phase,
    iter_cascade,
    phase_jump_time,
    single_cavity_fsc,
    time_tail_ratio,
    transfer_function,
)
from biphoton.grid import FreqGrid, ResolutionError, SpectralAmplitude, fft_to_time, total_energy
from biphoton.spectral import PhysParams, build_fb, heralded_lorentzian


def test_transfer_examples():
    assert transfer_function(0.0, 0.7) == -1
    w = np.linspace(-1e3, 1e3, 20001)
    for gc in (1e-3, 0.5, 3.0, 1e6):
        assert np.max(np.abs(np.abs(transfer_function(w, gc)) - 1)) <= 4 * np.finfo(float).eps
    assert np.allclose(transfer_function(w, 0.8), 1 - 0.8 / (0.4 - 1j * w), rtol=1e-13)
    assert np.max(np.abs(transfer_function(np.linspace(-300, 300, 101), 1e9) + 1)) <= 4 * 300 / 1e9 * (1 + 1e-9)


@pytest.mark.parametrize("gc", [0.0, -1.0, np.nan])
def test_transfer_invalid(gc):
    with pytest.raises(ValueError):
        transfer_function(1.0, gc)


def test_apply_preserves_energy(small_grids):
    gs, gi = small_grids
    f = build_fb(PhysParams(5.0, 0.25), gs, gi)
    f_m = apply_cavity_transfer(f, 0.9)
    assert total_energy(f_m) == pytest.approx(total_energy(f), rel=1e-14)


def test_compensation_parseval_and_phase_free():
    g = FreqGrid(300, 8192)
    f_m = apply_cavity_transfer(heralded_lorentzian(5.0, g), 1.0)
    out = compensate_phase(f_m)
    assert total_energy(out) == pytest.approx(total_energy(f_m), rel=1e-10)
    psi = fft_to_time(out.values)
    assert np.max(np.abs(psi.imag)) < 1e-10 * np.max(np.abs(psi))
    assert psi.real.min() > -1e-10 * psi.real.max()


def test_compensation_global_phase(small_grids):
    gs, gi = small_grids
    f_m = apply_cavity_transfer(build_fb(PhysParams(5.0, 0.5), gs, gi), 1.3)
    rotated = f_m.with_values(f_m.values * np.exp(0.7j))
    a = compensate_phase(f_m, alias_tol=None).values
    b = compensate_phase(rotated, alias_tol=None).values
    assert np.max(np.abs(a - b)) < 1e-12 * np.max(np.abs(a))


def test_compensation_fixed_point():
    g = FreqGrid(20, 256)
    f = SpectralAmplitude(g, np.exp(-g.values**2 / 2))
    out = compensate_phase(f)
    assert np.linalg.norm(out.values - f.values) / np.linalg.norm(f.values) < 1e-10


def test_resolution_error_on_coarse_grid():
    g = FreqGrid(300, 64)
    f_m = apply_cavity_transfer(heralded_lorentzian(0.5, g), 0.5)
    assert time_tail_ratio(fft_to_time(f_m.values)) > 1e-3
    with pytest.raises(ResolutionError, match="n_points"):
        compensate_phase(f_m)
    compensate_phase(f_m, alias_tol=None)


def test_single_cavity_compression():
    p = PhysParams(5.0, 0.25, 0.8)
    f = single_cavity_fsc(p, FreqGrid(300, 256), FreqGrid(300, 8192))
    assert total_energy(f) == pytest.approx(1.0)
    width = fwhm_energy_window(f.idler_at_zero_signal()).width
    assert width <= 0.30 * 5.0
    with pytest.raises(ValueError):
        single_cavity_fsc(PhysParams(5.0, 0.25), FreqGrid(300, 64), FreqGrid(300, 64))


def _bracket(g, gc, dt):
    return analytic_temporal(PhysParams(g, 0.0, gc), 0.0, dt).real


@pytest.mark.parametrize("g, gc, expected", [(5.0, 1.0, 2 * np.log(3) / 4), (4.0, 2.0, np.log(1.5))])
def test_phase_jump_time_closed_form(g, gc, expected):
    t = phase_jump_time(PhysParams(g, 0.0, gc))
    assert t == pytest.approx(expected, rel=1e-14)
    root = optimize.brentq(lambda x: _bracket(g, gc, x), 1e-9, 50, xtol=1e-14)
    assert t == pytest.approx(root, rel=1e-10)


def test_phase_jump_known_value():
    assert phase_jump_time(PhysParams(5.0, 0.0, 1.0)) == pytest.approx(0.5493, abs=1e-4)


@pytest.mark.parametrize("g", [0.5, 1.0, 5.0])
def test_degenerate_limit(g):
    exact = phase_jump_time(PhysParams(g, 0.0, g))
    assert exact == 1 / g
    for eps in (1e-6, -1e-6):
        assert phase_jump_time(PhysParams(g, 0.0, g * (1 + eps))) == pytest.approx(exact, rel=1e-5)
    dt = np.linspace(0, 10 / g, 200)
    degenerate = _bracket(g, g, dt)
    assert np.allclose(degenerate, np.exp(-g * dt / 2) * (1 - g * dt), atol=1e-14)
    for eps in (1e-4, -1e-4):
        assert np.allclose(_bracket(g, g * (1 + eps), dt), degenerate, atol=1e-3)


def test_temporal_causality_and_origin():
    p = PhysParams(5.0, 0.0, 1.0)
    assert np.all(analytic_temporal(p, 0.0, np.linspace(-5, -1e-12, 50)) == 0)
    assert analytic_temporal(p, 0.0, 0.0) == 1.0
    pulsed = PhysParams(5.0, 0.25, 1.0)
    val = analytic_temporal(pulsed, 0.0, 0.0)
    assert val == pytest.approx(2 * np.sqrt(2 * np.pi) / 0.25)
    with pytest.raises(ValueError):
        analytic_temporal(PhysParams(5.0), 0.0, 1.0)


def test_cascade_infinite_cavity_recovers_linewidth():
    # the rectified truncation ripple narrows the line on ±300 (≈4.8); it fades as the window grows
    g = FreqGrid(3000, 65536)
    f = cascade_cavities(PhysParams(5.0, 0.0, 1e6), 1, g)
    assert fwhm_energy_window(f).width == pytest.approx(5.0, rel=0.02)


def test_cascade_zero_is_bare_lorentzian():
    g = FreqGrid(100, 1024)
    f = cascade_cavities(PhysParams(5.0), 0, g)
    assert np.array_equal(f.values, heralded_lorentzian(5.0, g).values)
    with pytest.raises(ValueError):
        cascade_cavities(PhysParams(5.0), 2, g)


def test_cascade_stages():
    g = FreqGrid(300, 16384)
    stages = list(iter_cascade(5.0, 1.0, 4, g))
    assert [s.n for s in stages] == [1, 2, 3, 4]
    widths = [fwhm_energy_window(s.amplitude).width for s in stages]
    assert all(b <= a + g.spacing for a, b in zip(widths, widths[1:]))
    assert all(s.energy_residual < 1e-10 for s in stages)
    assert all(total_energy(s.amplitude) == pytest.approx(1.0) for s in stages)


def test_cascade_per_stage_linewidths():
    g = FreqGrid(300, 8192)
    mixed = cascade_cavities(PhysParams(5.0), 2, g, stage_gammaC=[1.0, 1.0])
    uniform = cascade_cavities(PhysParams(5.0, 0.0, 1.0), 2, g)
    assert np.array_equal(mixed.values, uniform.values)
    with pytest.raises(ValueError):
        list(iter_cascade(5.0, [1.0], 2, g))
    with pytest.raises(ValueError):
        list(iter_cascade(5.0, 1.0, -1, g))
