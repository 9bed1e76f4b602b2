"""Sinusoidal band fits of residual rows.

A residual row divided by its fitted background is the relative rate
modulation, approximately doppler_slope * v(t). Fitting it with a damped
sinusoid at a known frequency is a lock-in style quadrature measurement.
"""

import logging
import math

import numpy as np
from scipy.optimize import minimize_scalar

from packages.core.dynamics import sinc
from packages.core.errors import InvalidParameterError

from .errors import FitFailureError
from .models import BandEnvelope, BandFit

logger = logging.getLogger(__name__)

# Band periods per window of the decay estimate
WINDOW_PERIODS = 5
# Windows weaker than this many standard errors are left out of the decay fit
MIN_WINDOW_SNR = 3.0
_DECAY_ITERATIONS = 20
_DECAY_RTOL = 1e-9


def relative_residual(residuals, fitted) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(rho, weights, mask): residual / fitted with Poisson inverse-variance weights."""
    residuals = np.asarray(residuals, dtype=float)
    fitted = np.asarray(fitted, dtype=float)
    mask = np.isfinite(residuals) & np.isfinite(fitted) & (fitted > 0)
    rho = np.zeros_like(residuals)
    rho[mask] = residuals[mask] / fitted[mask]
    return rho, np.where(mask, fitted, 0.0), mask


def _design(t: np.ndarray, omega: float, decay_rate: float, t_ref: float) -> np.ndarray:
    envelope = np.exp(-decay_rate * (t - t_ref))
    return np.column_stack(
        [envelope * np.sin(omega * t), envelope * np.cos(omega * t), np.ones_like(t)]
    )


def _linear_fit(t, rho, weights, omega, decay_rate, t_ref):
    root_w = np.sqrt(weights)
    design = _design(t, omega, decay_rate, t_ref)
    coef, *_ = np.linalg.lstsq(design * root_w[:, None], rho * root_w, rcond=None)
    normal = design.T @ (design * weights[:, None])
    cov = np.linalg.pinv(normal)
    return coef, cov


def _windows(t: np.ndarray, omega: float, periods: int) -> list[np.ndarray]:
    """Index arrays of consecutive full windows of ``periods`` band periods."""
    width = periods * 2.0 * math.pi / omega
    n = int(math.floor((t[-1] - t[0]) / width + 1e-9))
    index = np.floor((t - t[0]) / width).astype(np.int64)
    return [np.flatnonzero(index == k) for k in range(n)]


def _envelope(t, rho, weights, omega, decay_rate, periods) -> BandEnvelope:
    centers, amplitudes, sigmas = [], [], []
    for window in _windows(t, omega, periods):
        if window.size < 4:
            continue
        center = float(np.mean(t[window]))
        coef, cov = _linear_fit(
            t[window], rho[window], weights[window], omega, decay_rate, center
        )
        centers.append(center)
        amplitudes.append(math.hypot(coef[0], coef[1]))
        sigmas.append(math.sqrt(max(0.5 * (cov[0, 0] + cov[1, 1]), 0.0)))
    return BandEnvelope(
        centers=np.array(centers), amplitudes=np.array(amplitudes), sigmas=np.array(sigmas)
    )


def _decay_from_envelope(envelope: BandEnvelope, min_snr: float) -> float:
    keep = envelope.amplitudes > min_snr * envelope.sigmas
    if keep.sum() < 2:
        raise FitFailureError(
            f"Band decay needs two windows above {min_snr:g} standard errors, got {int(keep.sum())}"
        )
    amplitudes = envelope.amplitudes[keep]
    # np.polyfit weights multiply the unsquared residuals; sigma(ln a) = sigma / a
    slope, _ = np.polyfit(
        envelope.centers[keep],
        np.log(amplitudes),
        1,
        w=amplitudes / np.maximum(envelope.sigmas[keep], 1e-300),
    )
    return -float(slope)


def band_envelope(
    residuals,
    fitted,
    time_bins,
    omega: float,
    *,
    decay_rate: float = 0.0,
    periods: int = WINDOW_PERIODS,
) -> BandEnvelope:
    """Band amplitude in consecutive windows of ``periods`` band periods.

    Each window gets its own phase and offset; within a window the envelope
    follows ``decay_rate``, and amplitudes are referenced to the window center.
    """
    if omega <= 0 or not math.isfinite(omega):
        raise InvalidParameterError("omega must be positive", "omega")
    if periods < 1:
        raise InvalidParameterError("periods must be at least 1", "periods")
    t = np.asarray(time_bins, dtype=float)
    rho, weights, mask = relative_residual(residuals, fitted)
    if mask.sum() < 4:
        raise FitFailureError("Too few usable bins for a band fit")
    return _envelope(t[mask], rho[mask], weights[mask], omega, decay_rate, periods)


def fit_decay(
    residuals,
    fitted,
    time_bins,
    omega: float,
    *,
    decay_rate: float = 0.0,
    periods: int = WINDOW_PERIODS,
    min_snr: float = MIN_WINDOW_SNR,
) -> float:
    """Decay rate (1/s) of the band envelope.

    Log-linear fit of windowed band amplitudes, iterated so that the
    envelope assumed inside each window matches the fitted rate.

    Raises:
        FitFailureError: fewer than two windows carry a significant band
    """
    for _ in range(_DECAY_ITERATIONS):
        envelope = band_envelope(
            residuals, fitted, time_bins, omega, decay_rate=decay_rate, periods=periods
        )
        updated = _decay_from_envelope(envelope, min_snr)
        converged = abs(updated - decay_rate) <= _DECAY_RTOL * max(abs(updated), 1.0)
        decay_rate = updated
        if converged:
            break
    logger.debug(f"Band decay rate {decay_rate:.4g} 1/s")
    return decay_rate


def fit_band(
    residuals,
    fitted,
    time_bins,
    omega: float,
    *,
    t_ref: float = 0.0,
    decay_rate: float = 0.0,
    bin_width: float | None = None,
    free_decay: bool = False,
) -> BandFit:
    """Fit exp(-decay (s - t_ref)) A sin(omega s + phase) + c to one residual row.

    With ``bin_width`` the amplitude is corrected for averaging over a bin.
    With ``free_decay`` the decay rate is estimated from windowed band
    amplitudes (see ``fit_decay``), starting from ``decay_rate``.

    Raises:
        FitFailureError: fewer than four usable bins, or no measurable decay
    """
    if omega <= 0 or not math.isfinite(omega):
        raise InvalidParameterError("omega must be positive", "omega")
    t = np.asarray(time_bins, dtype=float)
    rho, weights, mask = relative_residual(residuals, fitted)
    if mask.sum() < 4:
        raise FitFailureError("Too few usable bins for a band fit")
    if free_decay:
        decay_rate = fit_decay(residuals, fitted, t, omega, decay_rate=decay_rate)
    t, rho, weights = t[mask], rho[mask], weights[mask]

    coef, cov = _linear_fit(t, rho, weights, omega, decay_rate, t_ref)
    correction = float(sinc(omega * bin_width / 2.0)) if bin_width else 1.0
    phasor = complex(coef[0], coef[1]) / correction
    sigma = math.sqrt(max(0.5 * (cov[0, 0] + cov[1, 1]), 0.0)) / abs(correction)
    return BandFit(
        omega=omega,
        amplitude=abs(phasor),
        phase=math.atan2(phasor.imag, phasor.real),
        decay_rate=decay_rate,
        phasor=phasor,
        phasor_sigma=sigma,
        t_ref=t_ref,
    )


def band_period(
    residuals,
    fitted,
    time_bins,
    omega_min: float,
    omega_max: float,
    *,
    n_scan: int = 400,
) -> float:
    """Period (s) of the strongest band between omega_min and omega_max.

    Scans the weighted sinusoid amplitude on a grid, then refines the best
    point with a bounded scalar search.
    """
    if not 0 < omega_min < omega_max:
        raise InvalidParameterError("need 0 < omega_min < omega_max", "omega_min")
    t = np.asarray(time_bins, dtype=float)

    def power(omega: float) -> float:
        return fit_band(residuals, fitted, t, omega).amplitude

    scan = np.linspace(omega_min, omega_max, n_scan)
    powers = np.array([power(w) for w in scan])
    best = int(np.argmax(powers))
    step = scan[1] - scan[0]
    lo, hi = max(omega_min, scan[best] - step), min(omega_max, scan[best] + step)
    refined = minimize_scalar(lambda w: -power(w), bounds=(lo, hi), method="bounded")
    omega = float(refined.x) if -refined.fun >= powers[best] else float(scan[best])
    logger.debug(f"Band frequency {omega / (2 * math.pi):.1f} Hz")
    return 2.0 * math.pi / omega
