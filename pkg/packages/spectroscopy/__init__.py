"""
Spectroscopy.

Phase-sensitive analysis of driven modes: RMS-velocity and absorbed-energy
spectra, t = 0 phase traces, offset interference, mode resolvability and
force extraction by resonance fitting.
"""

from .fitting import extract_force
from .models import ForceFit, ResolvabilityReport, SpectrumResult
from .output import read_spectra, write_force_fit, write_report, write_spectra
from .peaks import find_resonance_peaks, fwhm, has_zigzag, linewidth, trough_depth
from .resolvability import resolvability
from .spectra import (
    energy_spectrum,
    mean_square_velocity,
    mode_amplitudes,
    offset_scan,
    rms_spectrum,
    sidelobe_nulls,
)

__all__ = [
    # Models
    "SpectrumResult",
    "ResolvabilityReport",
    "ForceFit",
    # Spectra
    "rms_spectrum",
    "energy_spectrum",
    "offset_scan",
    "sidelobe_nulls",
    "mean_square_velocity",
    "mode_amplitudes",
    # Shape metrics
    "find_resonance_peaks",
    "trough_depth",
    "fwhm",
    "linewidth",
    "has_zigzag",
    "resolvability",
    # Fitting
    "extract_force",
    # Output
    "write_spectra",
    "read_spectra",
    "write_report",
    "write_force_fit",
]
