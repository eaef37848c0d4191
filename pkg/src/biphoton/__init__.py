"""Frequency-entangled biphoton spectra, cavity compression and Schmidt analysis."""

from .analysis import (
    FwhmEstimate,
    LinearFit,
    SchmidtResult,
    entropy,
    extrapolate_linear,
    fwhm_energy_window,
    kernel_eigenvalues,
    schmidt_decompose,
    schmidt_number,
)
from .cavity import (
    analytic_temporal,
    apply_cavity_transfer,
    cascade_cavities,
    compensate_phase,
    iter_cascade,
    phase_jump_time,
    single_cavity_fsc,
    transfer_function,
)
from .config import ConfigError, SweepConfig, load_config, parse_config, preset
from .grid import (
    FreqGrid,
    ResolutionError,
    SpectralAmplitude,
    TemporalAmplitude,
    TimeGrid,
    dual_time_grid,
    make_freq_grid,
    to_freq,
    to_time,
    total_energy,
)
from .spectral import PhysParams, build_fb, build_fb_idler_slice, heralded_lorentzian, superradiant_rate
from .sweep import SweepRecord, iter_sweep, run_sweep

__version__ = "0.1.0"
