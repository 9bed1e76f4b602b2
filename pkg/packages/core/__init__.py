"""
Driven-oscillator core.

Closed-form response of optically driven motional modes, the numerical
integration oracle used to check it, and the Lamb-Dicke validity estimate.
"""

from .dynamics import (
    oscillation_phase,
    signed_amplitude,
    trajectory,
    velocity_amplitude,
    velocity_response,
)
from .errors import (
    InvalidParameterError,
    ModelValidityWarning,
    OutputError,
    StepSizeError,
    UnknownProductError,
    VelocimetryError,
)
from .lamb_dicke import lamb_dicke
from .models import DriveConfig, LambDickeInputs, ModeParams, VelocityResponse
from .multimode import drive_frame_phasors, multimode_velocity
from .oracle import OracleTrajectory, ode_oracle

__all__ = [
    # Models
    "ModeParams",
    "DriveConfig",
    "VelocityResponse",
    "LambDickeInputs",
    # Closed forms
    "velocity_amplitude",
    "oscillation_phase",
    "velocity_response",
    "signed_amplitude",
    "trajectory",
    "multimode_velocity",
    "drive_frame_phasors",
    "lamb_dicke",
    # Oracle
    "ode_oracle",
    "OracleTrajectory",
    # Errors
    "VelocimetryError",
    "InvalidParameterError",
    "StepSizeError",
    "ModelValidityWarning",
    "OutputError",
    "UnknownProductError",
]
