"""Closed-form spectra of driven modes.

The velocity during detection is sum_i v_i sin(omega_i t + theta_i). Its mean
square over [0, T_det], keeping only difference-frequency terms, is

    sum_i v_i^2 / 2 + sum_{i<j} v_i v_j cos(dtheta + dw T/2) sinc(dw T/2)

with dw = omega_i - omega_j and dtheta = dw (t_offset + t_d / 2).
"""

import logging
import math
from collections.abc import Sequence

import numpy as np

from packages.core.dynamics import check_validity, signed_amplitude, sinc
from packages.core.errors import InvalidParameterError
from packages.core.models import DriveConfig, ModeParams, require_finite
from packages.core.multimode import drive_frame_phasors

from .models import ENERGY_CONVENTION, PHASE_CONVENTION, RMS_CONVENTION, SpectrumResult

logger = logging.getLogger(__name__)


def _grid(freq_grid) -> np.ndarray:
    grid = np.asarray(freq_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise InvalidParameterError("freq_grid must be a nonempty list", "freq_grid")
    if not np.all(np.isfinite(grid)) or np.any(grid <= 0):
        raise InvalidParameterError("freq_grid must hold positive frequencies", "freq_grid")
    return grid


def _mode_arrays(modes: Sequence[ModeParams]):
    if not modes:
        raise InvalidParameterError("at least one mode is required", "modes")
    omega = np.array([m.omega_z for m in modes])
    mass = np.array([m.mass for m in modes])
    weight = np.array([m.weight for m in modes])
    return omega, mass, weight


def mode_amplitudes(modes: Sequence[ModeParams], drive: DriveConfig, freq_grid) -> np.ndarray:
    """Signed closed-form amplitudes, shape (len(freq_grid), len(modes))."""
    grid = _grid(freq_grid)
    omega, mass, weight = _mode_arrays(modes)
    for w in omega:
        check_validity(w, grid)
    return signed_amplitude(
        omega[None, :], mass[None, :], weight[None, :], drive.force, grid[:, None], drive.t_d
    )


def mean_square_velocity(
    modes: Sequence[ModeParams], drive: DriveConfig, freq_grid, window: float,
    t_offset: float = 0.0,
) -> np.ndarray:
    """Time-averaged squared velocity over the detection window, per grid point."""
    if require_finite("window", window) <= 0:
        raise InvalidParameterError("window must be positive", "window")
    if require_finite("t_offset", t_offset) < 0:
        raise InvalidParameterError("t_offset must be non-negative", "t_offset")
    amplitudes = mode_amplitudes(modes, drive, freq_grid)
    omega, _, _ = _mode_arrays(modes)

    total = 0.5 * np.sum(amplitudes**2, axis=1)
    for i in range(len(modes)):
        for j in range(i + 1, len(modes)):
            dw = omega[i] - omega[j]
            dtheta = dw * (t_offset + drive.t_d / 2.0)
            half = dw * window / 2.0
            total = total + amplitudes[:, i] * amplitudes[:, j] * math.cos(dtheta + half) * float(
                sinc(half)
            )
    return total


def energy_spectrum(modes: Sequence[ModeParams], drive: DriveConfig, freq_grid) -> np.ndarray:
    """Absorbed energy sum_i m_i v_i^2 / 2 (J) per grid point."""
    amplitudes = mode_amplitudes(modes, drive, freq_grid)
    _, mass, _ = _mode_arrays(modes)
    return np.sum(0.5 * mass[None, :] * amplitudes**2, axis=1)


def rms_spectrum(
    modes: Sequence[ModeParams],
    drive: DriveConfig,
    freq_grid,
    window: float,
    t_offset: float = 0.0,
) -> SpectrumResult:
    """Integrated RMS velocity, absorbed energy and t = 0 phase trace."""
    grid = _grid(freq_grid)
    mean_square = mean_square_velocity(modes, drive, grid, window, t_offset)
    phasors = drive_frame_phasors(modes, drive, grid, t_offset).sum(axis=1)

    return SpectrumResult(
        freq_grid=grid,
        rms_velocity=np.sqrt(np.clip(mean_square, 0.0, None)),
        absorbed_energy=energy_spectrum(modes, drive, grid),
        phase_trace_t0=np.unwrap(np.angle(phasors)),
        amplitude_t0=np.abs(phasors),
        t_offset=t_offset,
        window=window,
        t_d=drive.t_d,
        metadata={
            "rms_convention": RMS_CONVENTION,
            "energy_convention": ENERGY_CONVENTION,
            "phase_convention": PHASE_CONVENTION,
            "modes": [
                {"omega_z": m.omega_z, "mass": m.mass, "weight": m.weight} for m in modes
            ],
            "drive": {"force": drive.force, "t_d": drive.t_d, "psi": drive.psi},
        },
    )


def offset_scan(
    modes: Sequence[ModeParams],
    drive: DriveConfig,
    offsets,
    freq_grid,
    window: float,
) -> list[SpectrumResult]:
    """rms_spectrum for each drive-to-detection offset (s)."""
    offsets = [require_finite("offset", o) for o in offsets]
    if any(o < 0 for o in offsets):
        raise InvalidParameterError("offsets must be non-negative", "offsets")
    logger.debug(f"Offset scan over {len(offsets)} offsets")
    return [rms_spectrum(modes, drive, freq_grid, window, t_offset=o) for o in offsets]


def sidelobe_nulls(mode: ModeParams, drive: DriveConfig, n_max: int) -> np.ndarray:
    """Drive frequencies omega_z +/- 2 pi n / t_d, n = 1..n_max, ascending."""
    if int(n_max) < 1:
        raise InvalidParameterError("n_max must be at least 1", "n_max")
    n = np.arange(1, int(n_max) + 1)
    offsets = 2.0 * math.pi * n / drive.t_d
    return np.concatenate([mode.omega_z - offsets[::-1], mode.omega_z + offsets])
