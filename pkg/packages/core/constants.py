"""Physical constants and reference values for 9Be+ experiments."""

import math

from scipy import constants

HBAR = constants.hbar
AMU = constants.atomic_mass
TWO_PI = 2.0 * math.pi

BE9_MASS_AMU = 9.0121831
BE9_MASS = BE9_MASS_AMU * AMU

# Axial COM mode and detection transition
COM_FREQUENCY_HZ = 867.0e3
DETECTION_WAVELENGTH = 313.0e-9
BE9_LINEWIDTH_HZ = 19.4e6

# 1 yN in SI
YOCTONEWTON = 1.0e-24

# Fractional detuning beyond which the near-resonant closed forms are flagged
VALIDITY_LIMIT = 0.05
