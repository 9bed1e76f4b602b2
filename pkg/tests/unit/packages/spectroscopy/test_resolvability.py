"""Tests for two-mode discrimination."""

import math

import numpy as np
import pytest

from packages.core.errors import InvalidParameterError
from packages.core.models import DriveConfig, ModeParams
from packages.spectroscopy.resolvability import resolvability

T_D = 1e-3
WINDOW = 40e-6


@pytest.fixture
def long_drive(be9_mode):
    return DriveConfig(force=1e-22, omega_d=be9_mode.omega_z, t_d=T_D)


@pytest.fixture
def scan(be9_mode):
    return be9_mode.omega_z + 2.0 * math.pi * np.arange(-4000.0, 4000.0 + 1, 20.0)


def _pair(mode, multiple):
    spacing = multiple * 2.0 * math.pi / T_D
    return [
        ModeParams(omega_z=mode.omega_z - spacing / 2, mass=mode.mass, weight=0.5),
        ModeParams(omega_z=mode.omega_z + spacing / 2, mass=mode.mass, weight=0.5),
    ]


def test_wide_pair_shows_two_peaks(be9_mode, long_drive, scan):
    report = resolvability(_pair(be9_mode, 4.0), long_drive, scan, WINDOW)
    assert report.peak_count == 2
    assert report.peak_count_incoherent == 2
    assert report.distinguishable


def test_coherent_trough_deeper(be9_mode, long_drive, scan):
    report = resolvability(_pair(be9_mode, 1.0), long_drive, scan, WINDOW)
    assert report.trough_depth_coherent > report.trough_depth_incoherent
    assert report.mode_spacing == pytest.approx(2.0 * math.pi / T_D)


def test_close_pair_distinguished_by_phase(be9_mode, long_drive, scan):
    """One energy peak, but the phase trace zig-zags."""
    report = resolvability(_pair(be9_mode, 0.25), long_drive, scan, WINDOW)
    assert report.peak_count_incoherent == 1
    assert report.zigzag
    assert report.distinguishable


def test_single_mode_has_no_zigzag(be9_mode, long_drive, scan):
    twin = ModeParams(omega_z=be9_mode.omega_z, mass=be9_mode.mass, weight=0.5)
    report = resolvability([twin, twin], long_drive, scan, WINDOW)
    assert not report.zigzag
    assert report.peak_count == 1
    assert not report.distinguishable


def test_requires_two_modes(be9_mode, long_drive, scan):
    with pytest.raises(InvalidParameterError, match="exactly two"):
        resolvability([be9_mode], long_drive, scan, WINDOW)


def test_report_dict(be9_mode, long_drive, scan):
    report = resolvability(_pair(be9_mode, 2.0), long_drive, scan, WINDOW)
    data = report.as_dict()
    assert set(data) >= {"peak_count", "trough_depth_coherent", "zigzag", "criterion"}
