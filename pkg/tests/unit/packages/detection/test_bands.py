"""Tests for sinusoidal band fits of residual rows."""

import math

import numpy as np
import pytest

from packages.core.errors import InvalidParameterError
from packages.detection.bands import (
    WINDOW_PERIODS,
    band_envelope,
    band_period,
    fit_band,
    fit_decay,
    relative_residual,
)
from packages.detection.errors import FitFailureError

OMEGA = 2.0 * math.pi * 867.0e3


@pytest.fixture
def row(detection):
    """Noise-free background with a 10% band at the mode frequency."""
    t = detection.bin_centers
    fitted = 1000.0 * np.exp(-t / 10e-6)
    residuals = fitted * 0.1 * np.sin(OMEGA * t + 0.3)
    return t, fitted, residuals


def test_recovers_amplitude_and_phase(row):
    t, fitted, residuals = row
    band = fit_band(residuals, fitted, t, OMEGA)
    assert band.amplitude == pytest.approx(0.1, rel=1e-6)
    assert band.phase == pytest.approx(0.3, abs=1e-6)
    assert band.phasor == pytest.approx(0.1 * complex(math.cos(0.3), math.sin(0.3)), rel=1e-6)


def test_bin_averaging_correction(row, detection):
    t, fitted, residuals = row
    raw = fit_band(residuals, fitted, t, OMEGA)
    corrected = fit_band(residuals, fitted, t, OMEGA, bin_width=detection.bin_width)
    factor = math.sin(OMEGA * detection.bin_width / 2) / (OMEGA * detection.bin_width / 2)
    assert corrected.amplitude == pytest.approx(raw.amplitude / factor)
    assert corrected.phase == pytest.approx(raw.phase)


def test_free_decay(row):
    t, fitted, _ = row
    t_ref = float(t[0])
    residuals = fitted * 0.1 * np.exp(-3.0e4 * (t - t_ref)) * np.sin(OMEGA * t + 0.3)
    band = fit_band(residuals, fitted, t, OMEGA, t_ref=t_ref, free_decay=True)
    assert band.decay_rate == pytest.approx(3.0e4, rel=1e-4)
    assert band.amplitude == pytest.approx(0.1, rel=1e-4)


def test_envelope_windows(row):
    t, fitted, _ = row
    residuals = fitted * 0.1 * np.exp(-3.0e4 * t) * np.sin(OMEGA * t + 0.3)
    envelope = band_envelope(residuals, fitted, t, OMEGA, decay_rate=3.0e4)
    width = WINDOW_PERIODS * 2.0 * math.pi / OMEGA
    assert envelope.centers.size == int((t[-1] - t[0]) // width)
    np.testing.assert_allclose(
        envelope.amplitudes, 0.1 * np.exp(-3.0e4 * envelope.centers), rtol=1e-9
    )
    assert np.all(envelope.sigmas > 0)


def test_decay_needs_a_visible_band(row):
    t, fitted, _ = row
    with pytest.raises(FitFailureError, match="two windows"):
        fit_decay(np.zeros_like(fitted), fitted, t, OMEGA)


def test_known_decay_is_used(row):
    t, fitted, _ = row
    t_ref = float(t[0])
    residuals = fitted * 0.1 * np.exp(-3.0e4 * (t - t_ref)) * np.sin(OMEGA * t + 0.3)
    band = fit_band(residuals, fitted, t, OMEGA, t_ref=t_ref, decay_rate=3.0e4)
    assert band.amplitude == pytest.approx(0.1, rel=1e-6)
    assert band.t_ref == t_ref


def test_band_period(row):
    t, fitted, residuals = row
    period = band_period(residuals, fitted, t, 0.5 * OMEGA, 1.5 * OMEGA)
    assert period == pytest.approx(2.0 * math.pi / OMEGA, rel=1e-4)


def test_nan_rows_are_masked(row):
    t, fitted, residuals = row
    rho, weights, mask = relative_residual(np.full_like(residuals, np.nan), fitted)
    assert not mask.any()
    assert np.all(weights == 0)
    with pytest.raises(FitFailureError, match="Too few"):
        fit_band(np.full_like(residuals, np.nan), fitted, t, OMEGA)


def test_invalid_frequency(row):
    t, fitted, residuals = row
    with pytest.raises(InvalidParameterError, match="omega"):
        fit_band(residuals, fitted, t, -1.0)
    with pytest.raises(InvalidParameterError):
        band_period(residuals, fitted, t, OMEGA, 0.5 * OMEGA)
