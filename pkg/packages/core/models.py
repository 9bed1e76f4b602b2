"""Data models for the driven-oscillator core.

All quantities are SI with angular frequencies in rad/s. Config files carry Hz;
conversion happens in the scenario loader.
"""

import math
from dataclasses import dataclass

from .errors import InvalidParameterError


def require_finite(name: str, value: float) -> float:
    """Return value as float, raising InvalidParameterError when it is not finite."""
    try:
        value = float(value)
    except (TypeError, ValueError) as e:
        raise InvalidParameterError(f"{name} must be a number, got {value!r}", name) from e
    if not math.isfinite(value):
        raise InvalidParameterError(f"{name} must be finite, got {value}", name)
    return value


@dataclass(frozen=True)
class ModeParams:
    """One motional mode.

    Attributes:
        omega_z: Resonant angular frequency (rad/s)
        mass: Effective mass (kg)
        weight: Fraction of the drive force coupling into this mode, in [0, 1]
    """

    omega_z: float
    mass: float
    weight: float = 1.0

    def __post_init__(self):
        if require_finite("omega_z", self.omega_z) <= 0:
            raise InvalidParameterError("omega_z must be positive", "omega_z")
        if require_finite("mass", self.mass) <= 0:
            raise InvalidParameterError("mass must be positive", "mass")
        if not 0.0 <= require_finite("weight", self.weight) <= 1.0:
            raise InvalidParameterError("weight must lie in [0, 1]", "weight")


@dataclass(frozen=True)
class DriveConfig:
    """Optical dipole drive F_d sin(omega_d t + psi) applied for t_d.

    Attributes:
        force: Force magnitude (N)
        omega_d: Drive angular frequency (rad/s)
        t_d: Drive duration (s)
        psi: Drive phase (rad)
    """

    force: float
    omega_d: float
    t_d: float
    psi: float = 0.0

    def __post_init__(self):
        if require_finite("force", self.force) < 0:
            raise InvalidParameterError("force must be non-negative", "force")
        if require_finite("omega_d", self.omega_d) <= 0:
            raise InvalidParameterError("omega_d must be positive", "omega_d")
        if require_finite("t_d", self.t_d) <= 0:
            raise InvalidParameterError("t_d must be positive", "t_d")
        require_finite("psi", self.psi)

    def at(self, omega_d: float) -> "DriveConfig":
        """Copy of this drive retuned to omega_d (sweeps use the drive as a template)."""
        return DriveConfig(force=self.force, omega_d=omega_d, t_d=self.t_d, psi=self.psi)

    def with_force(self, force: float) -> "DriveConfig":
        return DriveConfig(force=force, omega_d=self.omega_d, t_d=self.t_d, psi=self.psi)

    def with_duration(self, t_d: float) -> "DriveConfig":
        return DriveConfig(force=self.force, omega_d=self.omega_d, t_d=t_d, psi=self.psi)


@dataclass(frozen=True)
class VelocityResponse:
    """Steady-state velocity v sin(omega_z t + phase) after the drive.

    The amplitude is non-negative; a negative closed-form factor shows up as an
    extra pi in the phase.
    """

    amplitude: float
    phase: float

    def __post_init__(self):
        if require_finite("amplitude", self.amplitude) < 0:
            raise InvalidParameterError("amplitude must be non-negative", "amplitude")
        require_finite("phase", self.phase)


@dataclass(frozen=True)
class LambDickeInputs:
    """Inputs of the single-ion Lamb-Dicke parameter.

    Attributes:
        mass: Ion mass (kg)
        omega_z: Mode angular frequency (rad/s)
        wavevector: Drive wavevector k (rad/m)
        half_angle: Beam half crossing angle theta (rad)
        nbar: Mean thermal phonon occupation
    """

    mass: float
    omega_z: float
    wavevector: float
    half_angle: float
    nbar: float = 0.0

    def __post_init__(self):
        for name in ("mass", "omega_z", "wavevector"):
            if require_finite(name, getattr(self, name)) <= 0:
                raise InvalidParameterError(f"{name} must be positive", name)
        if require_finite("half_angle", self.half_angle) < 0:
            raise InvalidParameterError("half_angle must be non-negative", "half_angle")
        if require_finite("nbar", self.nbar) < 0:
            raise InvalidParameterError("nbar must be non-negative", "nbar")
