"""Tests for the Doppler-modulated scatter rate."""

import dataclasses

import numpy as np
import pytest

from packages.detection.fluorescence import (
    doppler_slope,
    relative_slope,
    rest_rate,
    scatter_rate,
)


def test_rest_rate_is_lorentzian(detection):
    hw2 = (detection.linewidth / 2) ** 2
    expected = detection.base_rate * hw2 / (detection.detuning**2 + hw2)
    assert rest_rate(detection) == pytest.approx(expected)
    assert scatter_rate(0.0, detection) == pytest.approx(expected)


def test_red_detuning_brightens_with_positive_kv(detection):
    """delta + k v moves toward zero for a red-detuned beam."""
    assert detection.detuning < 0
    assert scatter_rate(1.0, detection) > rest_rate(detection)
    assert scatter_rate(-1.0, detection) < rest_rate(detection)
    assert doppler_slope(detection) > 0


def test_rate_bounded_by_base_rate(detection):
    v = np.linspace(-20, 20, 401)
    rates = scatter_rate(v, detection)
    assert np.all(rates > 0)
    assert np.all(rates <= detection.base_rate)
    # Line center at k v = -delta
    peak_v = -detection.detuning / detection.k_detect
    assert scatter_rate(peak_v, detection) == pytest.approx(detection.base_rate)


def test_small_velocity_is_linear(detection):
    v = 1e-3
    relative = scatter_rate(v, detection) / rest_rate(detection) - 1.0
    assert relative == pytest.approx(doppler_slope(detection) * v, rel=1e-3)


def test_linear_lineshape_is_clipped(detection):
    linear = dataclasses.replace(detection, lineshape="linear")
    v = np.array([-100.0, 0.0, 100.0])
    rates = scatter_rate(v, linear)
    assert rates[0] == 0.0
    assert rates[1] == pytest.approx(rest_rate(detection))
    assert rates[2] == linear.base_rate


def test_relative_slope_sign(detection):
    blue = dataclasses.replace(detection, detuning=-detection.detuning)
    assert relative_slope(blue) == pytest.approx(-relative_slope(detection))
