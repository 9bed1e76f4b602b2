"""Lamb-Dicke parameter of the optical dipole drive."""

import math

from .constants import HBAR
from .models import LambDickeInputs


def lamb_dicke(inputs: LambDickeInputs) -> float:
    """eta = sqrt(hbar / (2 m omega_z)) * 2 k sin(theta) * sqrt(nbar + 1).

    The spatially uniform force model needs eta << 1.
    """
    ground_extent = math.sqrt(HBAR / (2.0 * inputs.mass * inputs.omega_z))
    projected_k = 2.0 * inputs.wavevector * math.sin(inputs.half_angle)
    return ground_extent * projected_k * math.sqrt(inputs.nbar + 1.0)
