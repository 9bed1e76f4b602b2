"""First-photon sampling by thinning of an inhomogeneous Poisson process.

Candidate events are drawn at the bounding rate R0 and accepted with
probability lambda(t) / R0, with lambda(t) = scatter_rate(v(t) exp(-gamma t)).
The first accepted candidate inside the window is the stop event.
"""

from collections.abc import Callable

import numpy as np

from .fluorescence import scatter_rate
from .models import DetectionConfig

VelocityFn = Callable[[np.ndarray], np.ndarray]


def _as_generator(rng_seed) -> np.random.Generator:
    if isinstance(rng_seed, np.random.Generator):
        return rng_seed
    return np.random.default_rng(rng_seed)


def sample_first_photons(
    velocity_fn: VelocityFn, det: DetectionConfig, n: int, rng_seed
) -> np.ndarray:
    """First-photon times (s) for n independent repetitions, NaN when none fell in the window.

    All repetitions advance together; the draw order depends only on n and
    the generator state, so a fixed seed gives bit-identical output.
    """
    rng = _as_generator(rng_seed)
    bound = det.base_rate
    first = np.full(n, np.nan)
    clock = np.zeros(n)
    active = np.arange(n)

    while active.size:
        clock[active] += rng.exponential(1.0 / bound, size=active.size)
        in_window = clock[active] <= det.window
        active = active[in_window]
        if not active.size:
            break
        t = clock[active]
        velocity = np.asarray(velocity_fn(t), dtype=float)
        if det.damping_rate:
            velocity = velocity * np.exp(-det.damping_rate * t)
        accept = rng.random(active.size) * bound <= scatter_rate(velocity, det)
        first[active[accept]] = t[accept]
        active = active[~accept]

    return first


def sample_first_photon(velocity_fn: VelocityFn, det: DetectionConfig, rng_seed) -> float | None:
    """Single first-photon time (s), or None when no photon arrives within the window."""
    t = sample_first_photons(velocity_fn, det, 1, rng_seed)[0]
    return None if np.isnan(t) else float(t)
