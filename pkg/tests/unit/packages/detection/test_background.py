"""Tests for arrival histograms and the exponential background fit."""

import dataclasses

import numpy as np
import pytest
from scipy import stats

from packages.detection.background import (
    fit_exponential_background,
    histogram_arrivals,
    undriven_cdf,
)
from packages.detection.errors import FitFailureError
from packages.detection.sampler import sample_first_photons


class TestHistogram:
    def test_bins_are_left_closed(self, detection):
        exact = dataclasses.replace(detection, dead_time=0.0, bin_width=0.25, window=2.0)
        counts = histogram_arrivals(np.array([0.25, 0.25 - 1e-9]), exact)
        assert counts[0] == 1
        assert counts[1] == 1

    def test_drops_dead_time_and_overflow(self, detection):
        arrivals = np.array([0.0, detection.dead_time - 1e-9, detection.window + 1e-9])
        assert histogram_arrivals(arrivals, detection).sum() == 0

    def test_length_matches_bins(self, detection):
        counts = histogram_arrivals(np.array([]), detection)
        assert counts.shape == (detection.n_bins,)
        assert detection.n_bins == 355


class TestBackgroundFit:
    def test_recovers_noise_free_exponential(self, detection):
        t = detection.bin_centers
        counts = 500.0 * np.exp(-t / 12e-6)
        fit = fit_exponential_background(counts, t)
        assert fit.tau == pytest.approx(12e-6, rel=1e-9)
        assert fit.amplitude == pytest.approx(500.0, rel=1e-9)
        np.testing.assert_allclose(fit.residuals, 0.0, atol=1e-8)

    def test_residuals_sum_to_zero(self, detection):
        t = detection.bin_centers
        rng = np.random.default_rng(0)
        counts = rng.poisson(200.0 * np.exp(-t / 12e-6)).astype(float)
        fit = fit_exponential_background(counts, t)
        assert fit.residuals.sum() == pytest.approx(0.0, abs=1e-8)
        assert fit.tau == pytest.approx(12e-6, rel=0.05)
        np.testing.assert_allclose(fit.fitted + fit.residuals, counts)

    def test_too_few_bins(self, detection):
        counts = np.zeros(detection.n_bins)
        counts[:4] = 10
        with pytest.raises(FitFailureError, match="nonempty bins"):
            fit_exponential_background(counts, detection.bin_centers)

    def test_rising_counts_rejected(self, detection):
        t = detection.bin_centers
        with pytest.raises(FitFailureError, match="does not decay"):
            fit_exponential_background(10.0 * np.exp(t / 20e-6), t)

    def test_as_tuple(self, detection):
        t = detection.bin_centers
        fit = fit_exponential_background(100.0 * np.exp(-t / 10e-6), t)
        amplitude, tau, residuals = fit.as_tuple()
        assert (amplitude, tau) == (fit.amplitude, fit.tau)
        assert residuals is fit.residuals


class TestUndrivenCdf:
    OFFSET = 0.4e-6

    def _gated(self, det, n, seed):
        first = sample_first_photons(np.zeros_like, det, n, seed)
        gated = first[~np.isnan(first)] + self.OFFSET
        return gated[gated >= det.dead_time]

    def test_limits(self, detection):
        lower = detection.dead_time
        upper = detection.window + self.OFFSET
        values = undriven_cdf(np.array([lower, upper]), self.OFFSET, detection)
        np.testing.assert_allclose(values, [0.0, 1.0], atol=1e-12)

    def test_undriven_arrivals_are_uniform(self, detection):
        u = undriven_cdf(self._gated(detection, 50_000, 4), self.OFFSET, detection)
        assert stats.kstest(u, "uniform").pvalue > 0.01

    def test_wrong_rate_is_detected(self, detection):
        brighter = dataclasses.replace(detection, base_rate=1.3 * detection.base_rate)
        u = undriven_cdf(self._gated(brighter, 50_000, 4), self.OFFSET, detection)
        assert stats.kstest(u, "uniform").pvalue < 1e-6
