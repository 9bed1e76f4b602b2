"""Tests for the coherent multimode superposition."""

import math

import numpy as np
import pytest

from packages.core.dynamics import oscillation_phase, velocity_amplitude
from packages.core.errors import InvalidParameterError
from packages.core.models import ModeParams
from packages.core.multimode import drive_frame_phasors, multimode_velocity
from packages.core.oracle import max_step, ode_oracle


def test_single_mode_matches_oracle(be9_mode, drive):
    """Detection-time velocity equals the integrated motion after the drive."""
    short = drive.with_duration(100.0e-6).at(be9_mode.omega_z + 2.0 * math.pi * 1.5e3)
    dt = max_step(be9_mode, short) / 2.0
    oracle = ode_oracle(be9_mode, short, short.t_d + 5.0e-6, dt)
    after = oracle.times >= short.t_d
    detection_time = oracle.times[after] - short.t_d
    closed = multimode_velocity([be9_mode], short, detection_time)
    v = velocity_amplitude(be9_mode, short)
    assert np.max(np.abs(closed - oracle.velocities[after])) < 0.01 * v


def test_split_mode_equals_whole(be9_mode, drive):
    """Two identical half-weight modes add up to one full-weight mode."""
    half = ModeParams(omega_z=be9_mode.omega_z, mass=be9_mode.mass, weight=0.5)
    t = np.linspace(0, 10e-6, 50)
    np.testing.assert_allclose(
        multimode_velocity([half, half], drive, t),
        multimode_velocity([be9_mode], drive, t),
        rtol=1e-12,
        atol=1e-12,
    )


def test_offset_delays_phase(be9_mode, drive):
    """An offset t_offset is the same as detecting t_offset later."""
    t = np.linspace(0, 5e-6, 20)
    np.testing.assert_allclose(
        multimode_velocity([be9_mode], drive, t, t_offset=2e-6),
        multimode_velocity([be9_mode], drive, t + 2e-6),
        rtol=1e-9,
        atol=1e-12,
    )


def test_scalar_input(be9_mode, drive):
    assert isinstance(multimode_velocity([be9_mode], drive, 1e-6), float)


def test_phasor_argument_is_oscillation_phase(be9_mode, drive):
    omega_d = be9_mode.omega_z + 2.0 * math.pi * 1.0e3
    phasor = drive_frame_phasors([be9_mode], drive, [omega_d])[0, 0]
    assert abs(phasor) == pytest.approx(velocity_amplitude(be9_mode, drive.at(omega_d)))
    assert math.atan2(phasor.imag, phasor.real) == pytest.approx(
        oscillation_phase(be9_mode, drive.at(omega_d))
    )


def test_phasor_shape(be9_mode, drive):
    other = ModeParams(omega_z=be9_mode.omega_z + 1e3, mass=be9_mode.mass)
    phasors = drive_frame_phasors([be9_mode, other], drive, np.full(5, be9_mode.omega_z))
    assert phasors.shape == (5, 2)


def test_rejects_empty_modes(drive):
    with pytest.raises(InvalidParameterError, match="at least one mode"):
        multimode_velocity([], drive, 0.0)


def test_rejects_negative_offset(be9_mode, drive):
    with pytest.raises(InvalidParameterError, match="t_offset"):
        multimode_velocity([be9_mode], drive, 0.0, t_offset=-1.0)
