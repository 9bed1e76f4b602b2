"""Tests for the Lamb-Dicke estimate."""

import math

import pytest

from packages.core.constants import BE9_MASS, DETECTION_WAVELENGTH
from packages.core.errors import InvalidParameterError
from packages.core.lamb_dicke import lamb_dicke
from packages.core.models import LambDickeInputs


def _inputs(**overrides):
    values = {
        "mass": BE9_MASS,
        "omega_z": 2.0 * math.pi * 867.0e3,
        "wavevector": 2.0 * math.pi / DETECTION_WAVELENGTH,
        "half_angle": math.radians(0.75),
        "nbar": 23.0,
    }
    values.update(overrides)
    return LambDickeInputs(**values)


def test_thermal_be9_value():
    assert lamb_dicke(_inputs()) == pytest.approx(0.07, rel=0.1)


def test_scales_with_thermal_occupation():
    ground = lamb_dicke(_inputs(nbar=0.0))
    assert lamb_dicke(_inputs(nbar=3.0)) == pytest.approx(2.0 * ground)


@pytest.mark.parametrize("nbar", [0.0, 23.0])
def test_scales_as_inverse_root_of_frequency(nbar):
    base = lamb_dicke(_inputs(nbar=nbar))
    stiffer = lamb_dicke(_inputs(nbar=nbar, omega_z=4.0 * 2.0 * math.pi * 867.0e3))
    assert stiffer == pytest.approx(base / 2.0)


def test_zero_angle_gives_zero():
    assert lamb_dicke(_inputs(half_angle=0.0)) == 0.0


@pytest.mark.parametrize("field", ["mass", "omega_z", "wavevector"])
def test_non_positive_inputs_rejected(field):
    with pytest.raises(InvalidParameterError):
        _inputs(**{field: 0.0})


def test_negative_nbar_rejected():
    with pytest.raises(InvalidParameterError, match="nbar"):
        _inputs(nbar=-1.0)
