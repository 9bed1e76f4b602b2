"""Arrival histograms and exponential background removal."""

import logging

import numpy as np

from .errors import FitFailureError
from .fluorescence import rest_rate
from .models import BackgroundFit, DetectionConfig

logger = logging.getLogger(__name__)

MIN_NONEMPTY_BINS = 5


def histogram_arrivals(arrival_times: np.ndarray, det: DetectionConfig) -> np.ndarray:
    """Counts in left-closed bins of width bin_width starting at the dead time.

    Arrivals below the dead time or beyond the last full bin are dropped.
    """
    arrivals = np.asarray(arrival_times, dtype=float)
    index = np.floor((arrivals - det.dead_time) / det.bin_width).astype(np.int64)
    keep = (arrivals >= det.dead_time) & (index >= 0) & (index < det.n_bins)
    return np.bincount(index[keep], minlength=det.n_bins).astype(float)


def fit_exponential_background(counts, bin_centers) -> BackgroundFit:
    """Fit A exp(-t / tau) to a histogram row.

    tau comes from a log-linear least-squares fit weighted by the counts
    (empty bins skipped); A is the Poisson maximum-likelihood normalisation
    for that tau, so the residuals sum to zero.

    Raises:
        FitFailureError: fewer than five nonempty bins or a non-decaying fit
    """
    counts = np.asarray(counts, dtype=float)
    t = np.asarray(bin_centers, dtype=float)
    nonempty = counts > 0
    if nonempty.sum() < MIN_NONEMPTY_BINS:
        raise FitFailureError(
            f"Need at least {MIN_NONEMPTY_BINS} nonempty bins, got {int(nonempty.sum())}"
        )

    # np.polyfit weights multiply the unsquared residuals
    slope, _ = np.polyfit(t[nonempty], np.log(counts[nonempty]), 1, w=np.sqrt(counts[nonempty]))
    if not np.isfinite(slope) or slope >= 0:
        raise FitFailureError(f"Background does not decay (slope {slope:.3e} 1/s)")

    tau = -1.0 / slope
    shape = np.exp(-t / tau)
    amplitude = counts.sum() / shape.sum()
    fitted = amplitude * shape
    residuals = counts - fitted
    logger.debug(f"Background fit: A={amplitude:.4g}, tau={tau:.4e} s")
    return BackgroundFit(amplitude=amplitude, tau=tau, fitted=fitted, residuals=residuals)


def undriven_cdf(arrival_times, detection_offsets, det: DetectionConfig) -> np.ndarray:
    """CDF of gated arrival times for an ion at rest, evaluated at each arrival.

    The first photon after detection start is exponential at the rest rate,
    cut off at the window; the gated time adds the row's detection offset
    and the dead time cuts it from below. Values are uniform on [0, 1] when
    the arrivals carry no motion signal.
    """
    s = np.asarray(arrival_times, dtype=float)
    offsets = np.broadcast_to(np.asarray(detection_offsets, dtype=float), s.shape)
    rate = rest_rate(det)
    t = s - offsets
    lower = np.maximum(det.dead_time - offsets, 0.0)
    return np.expm1(-rate * (t - lower)) / np.expm1(-rate * (det.window - lower))
