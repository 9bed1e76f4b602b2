"""Tests for peak, trough, width and phase-shape metrics."""

import math

import numpy as np
import pytest

from packages.core.errors import InvalidParameterError
from packages.spectroscopy.peaks import (
    find_resonance_peaks,
    fwhm,
    has_zigzag,
    linewidth,
    phase_slopes,
    trough_depth,
)

X = np.linspace(-10, 10, 2001)


def _gauss(center, width=1.0, height=1.0):
    return height * np.exp(-0.5 * ((X - center) / width) ** 2)


class TestFindPeaks:
    def test_single_peak(self):
        assert list(find_resonance_peaks(_gauss(0.0))) == [1000]

    def test_two_peaks(self):
        peaks = find_resonance_peaks(_gauss(-3.0) + _gauss(3.0))
        np.testing.assert_allclose(X[peaks], [-3.0, 3.0], atol=1e-9)

    def test_small_sidelobes_ignored(self):
        y = np.abs(np.sinc(X))
        assert list(find_resonance_peaks(y)) == [1000]

    def test_weaker_mode_needs_lower_floor(self):
        y = _gauss(-3.0) + _gauss(3.0, height=0.3)
        assert list(find_resonance_peaks(y)) == [700]
        np.testing.assert_allclose(X[find_resonance_peaks(y, min_height=0.2)], [-3.0, 3.0])

    def test_plateau_reports_leftmost(self):
        y = np.array([0.0, 1.0, 1.0, 1.0, 0.0])
        assert list(find_resonance_peaks(y)) == [1]

    def test_fallback_to_global_max(self):
        y = np.linspace(0, 1, 10)
        assert list(find_resonance_peaks(y)) == [9]

    def test_empty_rejected(self):
        with pytest.raises(InvalidParameterError):
            find_resonance_peaks([])


class TestTroughDepth:
    def test_depth(self):
        assert trough_depth([0.0, 1.0, 0.5, 1.0, 0.0], [1, 3]) == pytest.approx(0.5)

    def test_single_peak_has_no_trough(self):
        assert trough_depth(_gauss(0.0), [1000]) == 0.0

    def test_uses_two_highest_peaks(self):
        y = np.array([0.0, 0.2, 0.1, 1.0, 0.0, 1.0, 0.0])
        assert trough_depth(y, [1, 3, 5]) == pytest.approx(1.0)


class TestWidth:
    def test_gaussian_fwhm(self):
        assert fwhm(X, _gauss(0.0)) == pytest.approx(2 * math.sqrt(2 * math.log(2)), rel=1e-4)

    def test_triangle_fwhm(self):
        y = np.clip(1.0 - np.abs(X - 1.0) / 2.0, 0.0, None)
        assert fwhm(X, y) == pytest.approx(2.0, abs=1e-9)

    def test_width_ignores_pedestal_of_neighbour(self):
        """Half maximum is measured from zero, not from the prominence base."""
        y = _gauss(0.0) + _gauss(2.5, height=0.8)
        half = 0.5 * y.max()
        above = X[y >= half]
        assert fwhm(X, y) == pytest.approx(above[-1] - above[0], abs=0.02)

    def test_peak_must_fall_below_half(self):
        with pytest.raises(InvalidParameterError, match="half maximum"):
            fwhm(X, np.ones_like(X))

    def test_linewidth_scales_inversely_with_drive_time(self, be9_mode, drive):
        short = linewidth(be9_mode, drive)
        long = linewidth(be9_mode, drive.with_duration(2.0 * drive.t_d))
        assert short / long == pytest.approx(2.0, rel=1e-3)


class TestZigzag:
    T_D = 1e-3

    def _grid(self):
        return 2.0 * math.pi * (867e3 + np.arange(-200, 201) * 20.0)

    def test_linear_phase_is_not_zigzag(self):
        grid = self._grid()
        phase = (grid - grid[200]) * self.T_D / 2
        assert not has_zigzag(grid, phase, self.T_D)

    def test_triangle_phase_is_zigzag(self):
        grid = self._grid()
        x = (grid - grid[0]) * self.T_D / 2
        phase = np.abs((x % 4.0) - 2.0)
        assert has_zigzag(grid, phase, self.T_D)

    def test_low_amplitude_steps_masked(self):
        grid = self._grid()
        phase = np.zeros_like(grid)
        amplitude = np.ones_like(grid)
        amplitude[100] = 0.0
        _, usable = phase_slopes(grid, phase, amplitude)
        assert not usable[99]
        assert not usable[100]
        assert usable[101]

    def test_large_wraps_masked(self):
        grid = self._grid()[:4]
        phase = np.array([0.0, 0.0, 2.0, 2.0])
        _, usable = phase_slopes(grid, phase)
        assert list(usable) == [True, False, True]
