"""Tests for start/stop gating."""

import numpy as np
import pytest

from packages.core.errors import InvalidParameterError
from packages.detection.gate import gate_origin, tac_gate


class TestGateOrigin:
    def test_last_pulse_before_drive_end(self):
        assert gate_origin(1.0, 2.5) == pytest.approx(2.0)

    def test_pulse_at_drive_end_is_accepted(self):
        assert gate_origin(1.0, 3.0) == pytest.approx(3.0)

    def test_shifted_origin(self):
        assert gate_origin(1.0, 2.5, origin=0.25) == pytest.approx(2.25)

    def test_negative_origin(self):
        assert gate_origin(1.0, 2.5, origin=-0.75) == pytest.approx(2.25)


class TestTacGate:
    def test_arrival_time(self):
        assert tac_gate(1.0, 2.5, 3.7) == pytest.approx(1.7)

    def test_vectorized(self):
        arrivals = tac_gate(1.0, 2.5, np.array([2.6, 3.7]), origin=np.array([0.0, 0.25]))
        np.testing.assert_allclose(arrivals, [0.6, 1.45])

    def test_photon_before_drive_end_rejected(self):
        with pytest.raises(InvalidParameterError, match="after drive_end"):
            tac_gate(1.0, 2.5, 2.5)

    def test_non_positive_period_rejected(self):
        with pytest.raises(InvalidParameterError, match="beat_period"):
            tac_gate(0.0, 2.5, 3.0)

    def test_nan_photon_rejected(self):
        with pytest.raises(InvalidParameterError):
            tac_gate(1.0, 2.5, [3.0, np.nan])


@pytest.mark.parametrize("seed", range(8))
def test_gate_matches_modular_folding(seed):
    """Gated arrivals equal photon times folded at the beat period, shifted by the drive end."""
    rng = np.random.default_rng(seed)
    period = rng.uniform(0.5e-6, 5e-6)
    drive_end = rng.uniform(50e-6, 500e-6)
    origin = rng.uniform(-3.0, 3.0, 2000) * period
    photon = drive_end + rng.uniform(1e-9, 40e-6, 2000)

    arrivals = tac_gate(period, drive_end, photon, origin=origin)

    lead = np.mod(drive_end - origin, period)
    np.testing.assert_allclose(arrivals, lead + (photon - drive_end), rtol=0, atol=1e-15)
    folded = np.mod(photon - origin, period)
    wrapped = np.mod(arrivals, period)
    np.testing.assert_allclose(
        np.exp(2j * np.pi * wrapped / period), np.exp(2j * np.pi * folded / period), atol=1e-8
    )
    assert np.all((arrivals >= 0) & (arrivals < period + 40e-6))
