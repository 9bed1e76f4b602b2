"""Doppler-modulated fluorescence rate.

The effective detuning seen by an ion moving with velocity v is
delta + k_detect v: for a red-detuned beam, motion with k_detect v > 0 brings
the laser closer to resonance and the ion scatters more.
"""

import numpy as np

from .models import DetectionConfig


def _half_width_sq(det: DetectionConfig) -> float:
    return (det.linewidth / 2.0) ** 2


def rest_rate(det: DetectionConfig) -> float:
    """Scatter rate of an ion at rest (1/s)."""
    hw2 = _half_width_sq(det)
    return det.base_rate * hw2 / (det.detuning**2 + hw2)


def relative_slope(det: DetectionConfig) -> float:
    """d ln R / d(k v) at v = 0: -2 delta / (delta^2 + Gamma^2 / 4)."""
    return -2.0 * det.detuning / (det.detuning**2 + _half_width_sq(det))


def doppler_slope(det: DetectionConfig) -> float:
    """d ln R / dv at v = 0 (s/m); relative rate change per unit velocity."""
    return det.k_detect * relative_slope(det)


def scatter_rate(velocity, det: DetectionConfig):
    """Detected scatter rate (1/s) for velocity v (scalar or array).

    Lorentzian: R0 (Gamma/2)^2 / ((delta + k v)^2 + (Gamma/2)^2), always in (0, R0].
    Linear: R(0) (1 + s k v), clipped to [0, R0] so thinning stays bounded.
    """
    v = np.asarray(velocity, dtype=float)
    if det.lineshape == "linear":
        rate = rest_rate(det) * (1.0 + relative_slope(det) * det.k_detect * v)
        rate = np.clip(rate, 0.0, det.base_rate)
    else:
        hw2 = _half_width_sq(det)
        rate = det.base_rate * hw2 / ((det.detuning + det.k_detect * v) ** 2 + hw2)
    return float(rate) if np.ndim(rate) == 0 else rate
