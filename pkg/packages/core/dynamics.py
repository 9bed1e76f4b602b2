"""Closed-form response of a classically driven harmonic oscillator.

The drive F_d sin(omega_d t + psi) acts for t_d starting from rest. Near
resonance the motion after the drive is a free oscillation

    zdot(t) = v sin(omega_z t + phi)

with v and phi given by the closed forms below. The sin(x)/x form is used
throughout so sweeps can cross omega_d = omega_z without special-casing.
"""

import logging
import warnings

import numpy as np

from .constants import VALIDITY_LIMIT
from .errors import InvalidParameterError, ModelValidityWarning
from .models import DriveConfig, ModeParams, VelocityResponse

logger = logging.getLogger(__name__)


def sinc(x):
    """Unnormalized sin(x)/x, equal to 1 at x = 0."""
    return np.sinc(np.asarray(x, dtype=float) / np.pi)


def check_validity(omega_z: float, omega_d) -> bool:
    """Warn when the fractional detuning leaves the near-resonant regime.

    Returns True when every drive frequency is within the validity limit.
    """
    detuning = np.max(np.abs(np.asarray(omega_d, dtype=float) - omega_z)) / omega_z
    if detuning < VALIDITY_LIMIT:
        return True
    message = (
        f"Fractional detuning {detuning:.3f} exceeds {VALIDITY_LIMIT}; "
        "near-resonant closed forms are unreliable"
    )
    logger.warning(message)
    warnings.warn(message, ModelValidityWarning, stacklevel=3)
    return False


def signed_amplitude(omega_z, mass, weight, force, omega_d, t_d):
    """Signed closed-form velocity factor, vectorized over any argument.

    Equals weight * 2 F w_d / (m (w_z^2 - w_d^2)) * sin((w_z - w_d) t_d / 2)
    and tends to weight * F t_d / (2 m) at resonance.
    """
    omega_z = np.asarray(omega_z, dtype=float)
    omega_d = np.asarray(omega_d, dtype=float)
    half_phase = (omega_z - omega_d) * t_d / 2.0
    return weight * force * omega_d * t_d / (mass * (omega_z + omega_d)) * sinc(half_phase)


def phase_offset(omega_z, omega_d, t_d):
    """Phase accumulated by the driven mode: (omega_d - omega_z) t_d / 2."""
    return (np.asarray(omega_d, dtype=float) - np.asarray(omega_z, dtype=float)) * t_d / 2.0


def velocity_amplitude(mode: ModeParams, drive: DriveConfig) -> float:
    """Steady-state velocity amplitude v (m/s) left by the drive."""
    check_validity(mode.omega_z, drive.omega_d)
    v = signed_amplitude(
        mode.omega_z, mode.mass, mode.weight, drive.force, drive.omega_d, drive.t_d
    )
    return float(abs(v))


def oscillation_phase(mode: ModeParams, drive: DriveConfig) -> float:
    """Oscillation phase phi (rad), affine in omega_d with slope t_d / 2."""
    check_validity(mode.omega_z, drive.omega_d)
    return float(phase_offset(mode.omega_z, drive.omega_d, drive.t_d))


def velocity_response(mode: ModeParams, drive: DriveConfig) -> VelocityResponse:
    """Amplitude and phase of the post-drive velocity.

    The phase includes the drive phase psi, and pi when the closed-form factor
    is negative (odd sidelobes).
    """
    check_validity(mode.omega_z, drive.omega_d)
    v = float(
        signed_amplitude(
            mode.omega_z, mode.mass, mode.weight, drive.force, drive.omega_d, drive.t_d
        )
    )
    phase = float(phase_offset(mode.omega_z, drive.omega_d, drive.t_d)) + drive.psi
    if v < 0:
        phase += np.pi
    return VelocityResponse(amplitude=abs(v), phase=phase)


def trajectory(mode: ModeParams, drive: DriveConfig, t):
    """Position z(t) (m) during the drive, starting from rest.

    Near-resonant approximation

        z(t) = 2 F / (m (w_z^2 - w_d^2)) sin(d t / 2) cos(w_z t + d t / 2 + psi)

    with d = w_d - w_z, scaled by the mode weight. Accepts scalar or array t.
    """
    t_arr = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(t_arr)):
        raise InvalidParameterError("t must be finite", "t")
    if np.any(t_arr < 0):
        raise InvalidParameterError("t must be non-negative", "t")
    check_validity(mode.omega_z, drive.omega_d)

    delta = drive.omega_d - mode.omega_z
    # 2F sin(d t/2) / (m (w_z^2 - w_d^2)) rewritten through sin(x)/x
    envelope = (
        -mode.weight
        * drive.force
        * t_arr
        * sinc(delta * t_arr / 2.0)
        / (mode.mass * (mode.omega_z + drive.omega_d))
    )
    z = envelope * np.cos(mode.omega_z * t_arr + delta * t_arr / 2.0 + drive.psi)
    return float(z) if np.ndim(z) == 0 else z
