"""
Photon detection.

Doppler-modulated fluorescence, Monte Carlo of the drive-synchronized
start/stop first-photon measurement, background removal and residual grids.
"""

from .background import fit_exponential_background, histogram_arrivals, undriven_cdf
from .bands import band_envelope, band_period, fit_band, fit_decay, relative_residual
from .errors import FitFailureError
from .fluorescence import doppler_slope, relative_slope, rest_rate, scatter_rate
from .gate import gate_origin, tac_gate
from .models import (
    ArrivalRecord,
    BackgroundFit,
    BandEnvelope,
    BandFit,
    DetectionConfig,
    ResidualGrid,
    RowArrivals,
)
from .output import read_arrivals, read_grid, write_arrivals, write_grid
from .sampler import sample_first_photon, sample_first_photons
from .seeds import row_generator, row_seed
from .sweep import make_velocity_fn, run_sweep, run_sweep_async, simulate_row

__all__ = [
    # Models
    "DetectionConfig",
    "ArrivalRecord",
    "RowArrivals",
    "ResidualGrid",
    "BackgroundFit",
    "BandFit",
    "BandEnvelope",
    # Fluorescence
    "scatter_rate",
    "rest_rate",
    "relative_slope",
    "doppler_slope",
    # Sampling and gating
    "sample_first_photon",
    "sample_first_photons",
    "tac_gate",
    "gate_origin",
    "row_generator",
    "row_seed",
    # Histograms and fits
    "histogram_arrivals",
    "fit_exponential_background",
    "undriven_cdf",
    "fit_band",
    "fit_decay",
    "band_envelope",
    "band_period",
    "relative_residual",
    # Sweeps
    "make_velocity_fn",
    "simulate_row",
    "run_sweep",
    "run_sweep_async",
    # Output
    "write_grid",
    "read_grid",
    "write_arrivals",
    "read_arrivals",
    # Errors
    "FitFailureError",
]
