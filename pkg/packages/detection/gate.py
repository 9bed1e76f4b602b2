"""Drive-synchronized start/stop gating.

Start pulses fire every beat period from the drive's phase origin. Only the
last start pulse at or before the end of the drive is accepted; the arrival
time is the photon time measured from that pulse.
"""

import numpy as np

from packages.core.errors import InvalidParameterError
from packages.core.models import require_finite

# Relative slack when drive_end lands on a start pulse
_ALIGN_EPS = 1e-9


def gate_origin(beat_period: float, drive_end, origin=0.0):
    """Time of the last start pulse at or before drive_end (scalar or array origin)."""
    origin = np.asarray(origin, dtype=float)
    cycles = np.floor((drive_end - origin) / beat_period + _ALIGN_EPS)
    start = origin + cycles * beat_period
    return float(start) if np.ndim(start) == 0 else start


def tac_gate(beat_period: float, drive_end: float, photon_time, origin=0.0):
    """Arrival time (s) of a photon relative to the accepted start pulse.

    Accepts scalar or array photon times and origins.

    Raises:
        InvalidParameterError: non-positive beat period or photon_time <= drive_end
    """
    if require_finite("beat_period", beat_period) <= 0:
        raise InvalidParameterError("beat_period must be positive", "beat_period")
    drive_end = require_finite("drive_end", drive_end)
    photon = np.asarray(photon_time, dtype=float)
    if np.any(~np.isfinite(photon)) or np.any(photon <= drive_end):
        raise InvalidParameterError("photon_time must be after drive_end", "photon_time")

    arrival = photon - gate_origin(beat_period, drive_end, origin)
    return float(arrival) if np.ndim(arrival) == 0 else arrival
