"""Coherent superposition of several driven modes.

Time origin: t = 0 is the start of detection. The drive ran over
[-t_d - t_offset, -t_offset], so mode i has accumulated the phase
omega_i (t_d + t_offset) + phi_i by the time detection starts.
"""

from collections.abc import Sequence

import numpy as np

from .dynamics import check_validity, phase_offset, signed_amplitude
from .errors import InvalidParameterError
from .models import DriveConfig, ModeParams, require_finite


def _validate(modes: Sequence[ModeParams], t_offset: float) -> None:
    if not modes:
        raise InvalidParameterError("at least one mode is required", "modes")
    if require_finite("t_offset", t_offset) < 0:
        raise InvalidParameterError("t_offset must be non-negative", "t_offset")


def multimode_velocity(
    modes: Sequence[ModeParams], drive: DriveConfig, t, t_offset: float = 0.0
):
    """Summed post-drive velocity (m/s) at detection time t (scalar or array).

    sum_i v_i sin(omega_i (t + t_offset + t_d) + phi_i + psi), with v_i the
    signed closed-form factor of each mode.
    """
    _validate(modes, t_offset)
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0):
        raise InvalidParameterError("t must be non-negative", "t")

    total = np.zeros_like(t_arr)
    elapsed = t_arr + t_offset + drive.t_d
    for mode in modes:
        check_validity(mode.omega_z, drive.omega_d)
        v = signed_amplitude(
            mode.omega_z, mode.mass, mode.weight, drive.force, drive.omega_d, drive.t_d
        )
        phi = phase_offset(mode.omega_z, drive.omega_d, drive.t_d)
        total = total + v * np.sin(mode.omega_z * elapsed + phi + drive.psi)
    return float(total) if np.ndim(total) == 0 else total


def drive_frame_phasors(
    modes: Sequence[ModeParams], drive: DriveConfig, omega_d, t_offset: float = 0.0
) -> np.ndarray:
    """Complex mode amplitudes at detection start, referenced to the drive phase.

    Entry [k, i] is v_i exp(i (omega_d - omega_i)(t_d / 2 + t_offset)) for drive
    frequency omega_d[k]. For a single mode at zero offset the argument is the
    oscillation phase phi.
    """
    _validate(modes, t_offset)
    omega_d = np.atleast_1d(np.asarray(omega_d, dtype=float))[:, None]
    omega_z = np.array([m.omega_z for m in modes])[None, :]
    mass = np.array([m.mass for m in modes])[None, :]
    weight = np.array([m.weight for m in modes])[None, :]
    v = signed_amplitude(omega_z, mass, weight, drive.force, omega_d, drive.t_d)
    return v * np.exp(1j * (omega_d - omega_z) * (drive.t_d / 2.0 + t_offset))
