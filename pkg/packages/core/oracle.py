"""Direct numerical integration of the driven equation of motion.

    m (zddot + omega_z^2 z) = weight F_d sin(omega_d t + psi)   for 0 <= t <= t_d
    m (zddot + omega_z^2 z) = 0                                  afterwards

Used to verify the closed forms in ``dynamics``; not part of any sweep.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import InvalidParameterError, StepSizeError
from .models import DriveConfig, ModeParams, require_finite

logger = logging.getLogger(__name__)

# Oscillation periods must be covered by at least this many samples
MIN_STEPS_PER_PERIOD = 50
RTOL = 1e-11


@dataclass(frozen=True)
class OracleTrajectory:
    """Sampled solution of the equation of motion."""

    times: np.ndarray
    positions: np.ndarray
    velocities: np.ndarray

    def envelope(self, omega: float) -> np.ndarray:
        """Velocity envelope sqrt(zdot^2 + (omega z)^2) of the sampled motion."""
        return np.hypot(self.velocities, omega * self.positions)


def max_step(mode: ModeParams, drive: DriveConfig) -> float:
    """Largest accepted sampling step for this mode and drive."""
    return 2.0 * math.pi / (MIN_STEPS_PER_PERIOD * max(mode.omega_z, drive.omega_d))


def ode_oracle(
    mode: ModeParams, drive: DriveConfig, t_end: float, dt: float
) -> OracleTrajectory:
    """Integrate from rest (z = zdot = 0) up to t_end, sampled every dt.

    The driven and free segments are integrated separately so the switch-off at
    t_d is exact. DOP853 with dense output, step bounded by dt.

    Raises:
        StepSizeError: dt does not resolve the oscillation
        InvalidParameterError: non-positive t_end or dt
    """
    t_end = require_finite("t_end", t_end)
    dt = require_finite("dt", dt)
    if t_end <= 0 or dt <= 0:
        raise InvalidParameterError("t_end and dt must be positive", "dt")
    limit = max_step(mode, drive)
    if dt > limit:
        raise StepSizeError(dt, limit)

    accel = mode.weight * drive.force / mode.mass
    omega_sq = mode.omega_z**2

    def driven(t, y):
        return [y[1], accel * math.sin(drive.omega_d * t + drive.psi) - omega_sq * y[0]]

    def free(t, y):
        return [y[1], -omega_sq * y[0]]

    n_steps = int(math.floor(t_end / dt + 1e-9))
    times = np.arange(n_steps + 1) * dt

    # Scales keep the absolute tolerance meaningful for yN-scale forces
    v_scale = accel * min(t_end, drive.t_d) / 2.0 or 1.0
    atol = [RTOL * v_scale / mode.omega_z, RTOL * v_scale]

    positions = np.zeros_like(times)
    velocities = np.zeros_like(times)
    state = [0.0, 0.0]
    segments = [(driven, 0.0, min(drive.t_d, t_end))]
    if t_end > drive.t_d:
        segments.append((free, drive.t_d, t_end))

    for rhs, start, stop in segments:
        solution = solve_ivp(
            rhs,
            (start, stop),
            state,
            method="DOP853",
            dense_output=True,
            rtol=RTOL,
            atol=atol,
            max_step=dt,
        )
        if not solution.success:
            raise InvalidParameterError(f"Integration failed: {solution.message}", "dt")
        mask = (times >= start) & (times <= stop)
        if mask.any():
            sampled = solution.sol(times[mask])
            positions[mask] = sampled[0]
            velocities[mask] = sampled[1]
        state = [solution.y[0][-1], solution.y[1][-1]]

    logger.debug(f"Oracle integrated {times.size} samples up to {t_end:.3e} s")
    return OracleTrajectory(times=times, positions=positions, velocities=velocities)
