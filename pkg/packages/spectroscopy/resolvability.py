"""Discrimination of two nearly degenerate modes."""

import logging
from collections.abc import Sequence

from packages.core.errors import InvalidParameterError
from packages.core.models import DriveConfig, ModeParams

from .models import ResolvabilityReport
from .peaks import find_resonance_peaks, has_zigzag, trough_depth
from .spectra import rms_spectrum

logger = logging.getLogger(__name__)


def resolvability(
    modes: Sequence[ModeParams],
    drive: DriveConfig,
    freq_grid,
    window: float,
    zigzag_threshold: float | None = None,
) -> ResolvabilityReport:
    """Compare the coherent (RMS) and incoherent (energy) views of a mode pair."""
    if len(modes) != 2:
        raise InvalidParameterError(f"exactly two modes required, got {len(modes)}", "modes")

    spectrum = rms_spectrum(modes, drive, freq_grid, window)
    coherent_peaks = find_resonance_peaks(spectrum.rms_velocity)
    energy_peaks = find_resonance_peaks(spectrum.absorbed_energy)
    zigzag = has_zigzag(
        spectrum.freq_grid,
        spectrum.phase_trace_t0,
        drive.t_d,
        amplitude=spectrum.amplitude_t0,
        threshold=zigzag_threshold,
    )
    report = ResolvabilityReport(
        mode_spacing=abs(modes[1].omega_z - modes[0].omega_z),
        peak_count=int(coherent_peaks.size),
        peak_count_incoherent=int(energy_peaks.size),
        trough_depth_coherent=trough_depth(spectrum.rms_velocity, coherent_peaks),
        trough_depth_incoherent=trough_depth(spectrum.absorbed_energy, energy_peaks),
        zigzag=zigzag,
        distinguishable=bool(coherent_peaks.size >= 2 or energy_peaks.size >= 2 or zigzag),
    )
    logger.debug(f"Resolvability: {report}")
    return report
