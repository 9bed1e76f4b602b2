"""Data models for spectra, resolvability reports and force fits."""

from dataclasses import dataclass, field
from typing import Any, Literal

import numpy as np

from packages.core.errors import InvalidParameterError

RMS_CONVENTION = (
    "sqrt of the time average over [0, T_det] of the squared coherent velocity sum, "
    "difference-frequency cross terms only"
)
ENERGY_CONVENTION = "sum_i m_i v_i^2 / 2 in J; phases discarded, no cross terms"
PHASE_CONVENTION = (
    "unwrapped arg of sum_i v_i exp(i (omega_d - omega_i)(t_d/2 + t_offset)), "
    "velocity phase at detection start relative to the drive"
)


@dataclass
class SpectrumResult:
    """Noise-free spectra over a drive-frequency grid.

    Attributes:
        freq_grid: Drive angular frequencies (rad/s)
        rms_velocity: Integrated RMS velocity of the coherent sum (m/s)
        absorbed_energy: Phase-discarding energy sum (J)
        phase_trace_t0: Velocity phase at detection start (rad)
        amplitude_t0: Magnitude of the coherent sum at detection start (m/s)
        t_offset: Delay between drive end and detection start (s)
        window: Integration window T_det (s)
        t_d: Drive duration of the template (s)
    """

    freq_grid: np.ndarray
    rms_velocity: np.ndarray
    absorbed_energy: np.ndarray
    phase_trace_t0: np.ndarray
    amplitude_t0: np.ndarray
    t_offset: float = 0.0
    window: float = 0.0
    t_d: float = 0.0
    metadata: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        n = len(self.freq_grid)
        for name in ("rms_velocity", "absorbed_energy", "phase_trace_t0", "amplitude_t0"):
            if len(getattr(self, name)) != n:
                raise InvalidParameterError(f"{name} must match freq_grid length", name)
        if np.any(np.asarray(self.rms_velocity) < 0):
            raise InvalidParameterError("rms_velocity must be non-negative", "rms_velocity")
        if np.any(np.asarray(self.absorbed_energy) < 0):
            raise InvalidParameterError("absorbed_energy must be non-negative", "absorbed_energy")

    def __len__(self) -> int:
        return len(self.freq_grid)


@dataclass(frozen=True)
class ResolvabilityReport:
    """Whether two nearly degenerate modes can be told apart.

    distinguishable is true when either spectrum shows two resonance peaks or
    the phase trace zig-zags.
    """

    mode_spacing: float
    peak_count: int
    peak_count_incoherent: int
    trough_depth_coherent: float
    trough_depth_incoherent: float
    zigzag: bool
    distinguishable: bool
    criterion: str = "peak_count >= 2 in either spectrum, or zig-zag phase trace"

    def __post_init__(self):
        for name in ("trough_depth_coherent", "trough_depth_incoherent"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise InvalidParameterError(f"{name} must lie in [0, 1]", name)
        if self.peak_count < 1 or self.peak_count_incoherent < 1:
            raise InvalidParameterError("peak counts must be at least 1", "peak_count")

    def as_dict(self) -> dict[str, Any]:
        return {
            "mode_spacing": self.mode_spacing,
            "peak_count": self.peak_count,
            "peak_count_incoherent": self.peak_count_incoherent,
            "trough_depth_coherent": self.trough_depth_coherent,
            "trough_depth_incoherent": self.trough_depth_incoherent,
            "zigzag": self.zigzag,
            "distinguishable": self.distinguishable,
            "criterion": self.criterion,
        }


@dataclass(frozen=True)
class ForceFit:
    """Drive force and mode frequency fitted to a resonance.

    Attributes:
        force: Estimated drive force (N)
        omega_z: Estimated mode frequency (rad/s)
        covariance: 2x2 covariance of (force, omega_z)
        reduced_chi2: Weighted residual sum of squares per degree of freedom
        n_points: Frequency points used
        n_starts: Multi-start points tried
        source: "spectrum" or "residual_grid"
        used_phase: Whether phase information entered the fit
        cost: Final least-squares cost (half the residual sum of squares)
    """

    force: float
    omega_z: float
    covariance: np.ndarray
    reduced_chi2: float
    n_points: int
    n_starts: int
    source: Literal["spectrum", "residual_grid"]
    used_phase: bool
    cost: float

    @property
    def force_sigma(self) -> float:
        return float(np.sqrt(max(self.covariance[0, 0], 0.0)))

    @property
    def omega_z_sigma(self) -> float:
        return float(np.sqrt(max(self.covariance[1, 1], 0.0)))

    def as_dict(self) -> dict[str, Any]:
        return {
            "force": self.force,
            "force_sigma": self.force_sigma,
            "omega_z": self.omega_z,
            "omega_z_sigma": self.omega_z_sigma,
            "covariance": np.asarray(self.covariance).tolist(),
            "reduced_chi2": self.reduced_chi2,
            "n_points": self.n_points,
            "n_starts": self.n_starts,
            "source": self.source,
            "used_phase": self.used_phase,
            "cost": self.cost,
        }
