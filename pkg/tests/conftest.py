"""
Pytest configuration and shared fixtures.
"""

import math

import pytest

from packages.core.constants import BE9_MASS, YOCTONEWTON
from packages.core.models import DriveConfig, ModeParams
from packages.detection.models import DetectionConfig

# Enable async testing
pytest_plugins = ["pytest_asyncio"]

COM_OMEGA = 2.0 * math.pi * 867.0e3


@pytest.fixture
def be9_mode():
    """Axial COM mode of a single 9Be+ ion at 867 kHz."""
    return ModeParams(omega_z=COM_OMEGA, mass=BE9_MASS)


@pytest.fixture
def drive():
    """100 yN resonant drive applied for 200 us."""
    return DriveConfig(force=100.0 * YOCTONEWTON, omega_d=COM_OMEGA, t_d=200.0e-6)


@pytest.fixture
def detection():
    """Red-detuned 313 nm detection with a 4.5 us dead time."""
    return DetectionConfig(
        base_rate=2.0e5,
        detuning=2.0 * math.pi * -12.0e6,
        linewidth=2.0 * math.pi * 19.4e6,
        k_detect=2.0 * math.pi / 313.0e-9,
        dead_time=4.5e-6,
    )


@pytest.fixture
def output_dir(tmp_path):
    """Run output directory inside the test's temp dir."""
    path = tmp_path / "runs"
    path.mkdir()
    return path
