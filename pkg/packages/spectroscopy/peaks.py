"""Peak, trough, width and phase-trace shape metrics of spectra."""

import logging
import math

import numpy as np
from scipy.signal import find_peaks, peak_widths

from packages.config import settings
from packages.core.dynamics import signed_amplitude
from packages.core.errors import InvalidParameterError
from packages.core.models import DriveConfig, ModeParams

logger = logging.getLogger(__name__)

# Amplitudes below this fraction of the maximum carry no usable phase
_PHASE_AMPLITUDE_FLOOR = 1e-6


def find_resonance_peaks(
    values,
    prominence: float | None = None,
    min_height: float | None = None,
) -> np.ndarray:
    """Indices of resonance peaks, ascending.

    Local maxima need a prominence of ``prominence`` times the global maximum
    and a height of at least ``min_height`` times it; plateaus report their
    leftmost index. Falls back to the global maximum when no interior peak
    qualifies, so at least one peak is always returned.
    """
    prominence = settings.fit.peak_prominence if prominence is None else prominence
    min_height = settings.fit.peak_min_height if min_height is None else min_height
    y = np.asarray(values, dtype=float)
    if y.size == 0:
        raise InvalidParameterError("values must be nonempty", "values")
    top = float(np.max(y))
    if top <= 0:
        return np.array([int(np.argmax(y))])

    _, props = find_peaks(y, prominence=prominence * top, plateau_size=1)
    left = np.asarray(props["left_edges"], dtype=int)
    left = left[y[left] >= min_height * top]
    if left.size == 0:
        return np.array([int(np.argmax(y))])
    return np.sort(left)


def trough_depth(values, peaks) -> float:
    """1 - min(between the two highest peaks) / mean(their heights); 0 for one peak."""
    y = np.asarray(values, dtype=float)
    peaks = np.asarray(peaks, dtype=int)
    if peaks.size < 2:
        return 0.0
    # Highest first, leftmost wins ties
    order = sorted(peaks.tolist(), key=lambda i: (-y[i], i))[:2]
    lo, hi = min(order), max(order)
    floor = float(np.min(y[lo : hi + 1]))
    mean_peak = float(np.mean(y[[lo, hi]]))
    if mean_peak <= 0:
        return 0.0
    return float(np.clip(1.0 - floor / mean_peak, 0.0, 1.0))


def fwhm(x, y) -> float:
    """Full width at half maximum of the main peak, by linear interpolation."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    peak = int(np.argmax(y))
    half = y[peak] / 2.0
    if not (np.any(y[:peak] < half) and np.any(y[peak:] < half)):
        raise InvalidParameterError("peak does not fall below half maximum inside the grid", "y")

    # Reference the width to zero rather than to the peak's prominence base
    _, _, left_ips, right_ips = peak_widths(
        y,
        np.array([peak], dtype=np.intp),
        rel_height=0.5,
        prominence_data=(
            np.array([y[peak]]),
            np.array([0], dtype=np.intp),
            np.array([y.size - 1], dtype=np.intp),
        ),
    )
    index = np.arange(y.size)
    return float(np.interp(right_ips[0], index, x) - np.interp(left_ips[0], index, x))


def linewidth(mode: ModeParams, drive: DriveConfig, points: int = 4001) -> float:
    """FWHM (rad/s) of the velocity-amplitude resonance of one mode."""
    span = 2.0 * 2.0 * math.pi / drive.t_d
    grid = np.linspace(mode.omega_z - span, mode.omega_z + span, points)
    amplitude = np.abs(
        signed_amplitude(mode.omega_z, mode.mass, mode.weight, drive.force, grid, drive.t_d)
    )
    return fwhm(grid, amplitude)


def phase_slopes(freq_grid, phase, amplitude=None) -> tuple[np.ndarray, np.ndarray]:
    """Discrete phase derivative and a mask of trustworthy steps.

    Steps wrapping by more than pi/2 (unresolved null crossings) or touching
    a near-zero amplitude are masked out.
    """
    x = np.asarray(freq_grid, dtype=float)
    step = np.angle(np.exp(1j * np.diff(np.asarray(phase, dtype=float))))
    slopes = step / np.diff(x)
    usable = np.abs(step) <= math.pi / 2.0
    if amplitude is not None:
        amp = np.asarray(amplitude, dtype=float)
        floor = _PHASE_AMPLITUDE_FLOOR * float(np.max(amp))
        usable &= (amp[:-1] > floor) & (amp[1:] > floor)
    return slopes, usable


def has_zigzag(
    freq_grid,
    phase,
    t_d: float,
    amplitude=None,
    threshold: float | None = None,
) -> bool:
    """True when the phase derivative changes sign at least twice.

    Slopes smaller than ``threshold`` * t_d / 2 are ignored.
    """
    threshold = settings.fit.zigzag_threshold if threshold is None else threshold
    slopes, usable = phase_slopes(freq_grid, phase, amplitude)
    significant = usable & (np.abs(slopes) >= threshold * t_d / 2.0)
    signs = np.sign(slopes[significant])
    changes = int(np.count_nonzero(signs[1:] != signs[:-1])) if signs.size > 1 else 0
    logger.debug(f"Phase trace: {changes} derivative sign changes")
    return changes >= 2
