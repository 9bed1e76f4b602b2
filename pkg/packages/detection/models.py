"""Data models for the photon-detection module.

Times are in seconds, rates in 1/s and detunings/linewidths in rad/s.
"""

from dataclasses import dataclass, field
from typing import Any, Literal

import numpy as np

from packages.core.errors import InvalidParameterError
from packages.core.models import require_finite

Lineshape = Literal["lorentzian", "linear"]


@dataclass(frozen=True)
class DetectionConfig:
    """Doppler detection laser, detector and histogram settings.

    Attributes:
        base_rate: Detected scatter rate R0 at line center (1/s)
        detuning: Laser minus atomic frequency (rad/s), negative is red
        linewidth: Atomic FWHM linewidth Gamma (rad/s)
        k_detect: Detection wavevector projected on the motion axis (rad/m)
        damping_rate: Velocity-amplitude decay rate during detection (1/s)
        dead_time: Arrival times below this are discarded (s)
        window: Detection window T_det (s)
        bin_width: Histogram bin width (s)
        lineshape: "lorentzian" or the linearized "linear" response
        beat_phase_jitter: Std. dev. of per-repetition start-pulse phase jitter (rad)
    """

    base_rate: float
    detuning: float
    linewidth: float
    k_detect: float
    damping_rate: float = 0.0
    dead_time: float = 0.0
    window: float = 40.0e-6
    bin_width: float = 100.0e-9
    lineshape: Lineshape = "lorentzian"
    beat_phase_jitter: float = 0.0

    def __post_init__(self):
        if require_finite("base_rate", self.base_rate) <= 0:
            raise InvalidParameterError("base_rate must be positive", "base_rate")
        require_finite("detuning", self.detuning)
        if require_finite("linewidth", self.linewidth) <= 0:
            raise InvalidParameterError("linewidth must be positive", "linewidth")
        require_finite("k_detect", self.k_detect)
        for name in ("damping_rate", "dead_time", "window", "bin_width", "beat_phase_jitter"):
            if require_finite(name, getattr(self, name)) < 0:
                raise InvalidParameterError(f"{name} must be non-negative", name)
        if self.bin_width <= 0 or self.bin_width >= self.window:
            raise InvalidParameterError("bin_width must lie in (0, window)", "bin_width")
        if self.dead_time >= self.window:
            raise InvalidParameterError("dead_time must be shorter than window", "dead_time")
        if self.lineshape not in ("lorentzian", "linear"):
            raise InvalidParameterError(f"Unknown lineshape {self.lineshape!r}", "lineshape")

    @property
    def n_bins(self) -> int:
        """Number of left-closed bins between dead_time and window."""
        return int(np.floor((self.window - self.dead_time) / self.bin_width + 1e-9))

    @property
    def bin_edges(self) -> np.ndarray:
        return self.dead_time + np.arange(self.n_bins + 1) * self.bin_width

    @property
    def bin_centers(self) -> np.ndarray:
        return self.dead_time + (np.arange(self.n_bins) + 0.5) * self.bin_width

    def as_dict(self) -> dict[str, Any]:
        return {
            "base_rate": self.base_rate,
            "detuning": self.detuning,
            "linewidth": self.linewidth,
            "k_detect": self.k_detect,
            "damping_rate": self.damping_rate,
            "dead_time": self.dead_time,
            "window": self.window,
            "bin_width": self.bin_width,
            "lineshape": self.lineshape,
            "beat_phase_jitter": self.beat_phase_jitter,
        }


@dataclass(frozen=True)
class ArrivalRecord:
    """One accepted start/stop event."""

    arrival_time: float
    repetition_index: int

    def __post_init__(self):
        if require_finite("arrival_time", self.arrival_time) < 0:
            raise InvalidParameterError("arrival_time must be non-negative", "arrival_time")


@dataclass(frozen=True)
class RowArrivals:
    """Gated arrival times of one sweep row, kept as parallel arrays."""

    arrival_times: np.ndarray
    repetition_indices: np.ndarray

    def __len__(self) -> int:
        return int(self.arrival_times.size)

    def records(self):
        """Iterate the row as ArrivalRecord objects."""
        for t, rep in zip(self.arrival_times, self.repetition_indices):
            yield ArrivalRecord(arrival_time=float(t), repetition_index=int(rep))


@dataclass(frozen=True)
class BackgroundFit:
    """Exponential background A exp(-t / tau) fitted to one histogram row."""

    amplitude: float
    tau: float
    fitted: np.ndarray
    residuals: np.ndarray

    def as_tuple(self) -> tuple[float, float, np.ndarray]:
        return self.amplitude, self.tau, self.residuals


@dataclass(frozen=True)
class BandFit:
    """Sinusoid fitted to the relative residual of one row.

    The row is modelled as exp(-decay (s - t_ref)) * amplitude * sin(omega s + phase)
    where s is the gated arrival time.
    """

    omega: float
    amplitude: float
    phase: float
    decay_rate: float
    phasor: complex
    phasor_sigma: float
    t_ref: float


@dataclass(frozen=True)
class BandEnvelope:
    """Band amplitude of one row measured in consecutive time windows.

    Attributes:
        centers: Mean arrival time of each window (s)
        amplitudes: Relative band amplitude at the window center
        sigmas: Standard error of each amplitude
    """

    centers: np.ndarray
    amplitudes: np.ndarray
    sigmas: np.ndarray


@dataclass
class ResidualGrid:
    """Background-subtracted arrival histograms indexed by (drive frequency, time bin).

    Attributes:
        drive_frequencies: Drive angular frequencies, one per row (rad/s)
        time_bins: Bin centers of the gated arrival time (s)
        residuals: counts minus fitted background; NaN rows failed their fit
        counts: Raw histogram counts
        fitted: Fitted background per row
        fit_params: (A, tau) per row, None when the fit failed
        row_errors: Failure message per row, None when the row is valid
        row_seeds: 64-bit seed word per row
        gate_origins: Drive-time of the accepted start pulse per row (s)
        detection_offsets: Gated arrival time at detection start per row (s)
        reps: Repetitions per row
        seed: Global sweep seed
        metadata: Configuration needed to reproduce the grid
        arrivals: Gated arrival times per row; empty for grids read back from files
    """

    drive_frequencies: np.ndarray
    time_bins: np.ndarray
    residuals: np.ndarray
    counts: np.ndarray
    fitted: np.ndarray
    fit_params: list[tuple[float, float] | None]
    row_errors: list[str | None]
    row_seeds: list[int]
    gate_origins: np.ndarray
    detection_offsets: np.ndarray
    reps: int
    seed: int
    metadata: dict[str, Any] = field(default_factory=dict)
    arrivals: list[RowArrivals] = field(default_factory=list)

    def __post_init__(self):
        if self.arrivals and len(self.arrivals) != len(self.drive_frequencies):
            raise InvalidParameterError("arrivals must hold one entry per row", "arrivals")
        expected = (len(self.drive_frequencies), len(self.time_bins))
        for name in ("residuals", "counts", "fitted"):
            if np.shape(getattr(self, name)) != expected:
                raise InvalidParameterError(f"{name} must have shape {expected}", name)

    @property
    def valid_rows(self) -> np.ndarray:
        return np.array([err is None for err in self.row_errors], dtype=bool)

    @property
    def failed_rows(self) -> list[int]:
        return [i for i, err in enumerate(self.row_errors) if err is not None]

    @property
    def bin_width(self) -> float:
        if len(self.time_bins) < 2:
            return float(self.metadata.get("detection", {}).get("bin_width", 0.0))
        return float(self.time_bins[1] - self.time_bins[0])
