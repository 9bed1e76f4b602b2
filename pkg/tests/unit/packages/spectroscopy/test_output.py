"""Tests for spectrum, report and force-fit files."""

import json
import math

import numpy as np
import pytest

from packages.core.errors import OutputError, UnknownProductError
from packages.core.models import ModeParams
from packages.spectroscopy.models import ForceFit
from packages.spectroscopy.output import (
    read_spectra,
    read_spectrum_table,
    write_force_fit,
    write_report,
    write_spectra,
)
from packages.spectroscopy.resolvability import resolvability
from packages.spectroscopy.spectra import offset_scan, rms_spectrum

WINDOW = 40e-6


@pytest.fixture
def scan(be9_mode):
    return be9_mode.omega_z + 2.0 * math.pi * np.arange(-2000.0, 2001.0, 100.0)


@pytest.mark.parametrize("table_format", ["csv", "json"])
def test_offset_scan_file(be9_mode, drive, scan, tmp_path, table_format):
    spectra = offset_scan([be9_mode], drive, [0.0, 1e-6, 2e-6], scan, WINDOW)
    data_path, meta_path = write_spectra(
        spectra, tmp_path, "offset_scan", table_format=table_format
    )
    assert data_path.name == f"offset_scan.{table_format}"
    loaded = read_spectra(data_path)
    assert [s.t_offset for s in loaded] == [0.0, 1e-6, 2e-6]
    for original, copy in zip(spectra, loaded):
        np.testing.assert_allclose(copy.rms_velocity, original.rms_velocity, rtol=1e-13)
        np.testing.assert_allclose(copy.freq_grid, original.freq_grid, rtol=1e-15)


def test_primary_columns(be9_mode, drive, scan, tmp_path):
    spectrum = rms_spectrum([be9_mode], drive, scan, WINDOW)
    data_path, _ = write_spectra([spectrum], tmp_path, "energy_spectrum")
    sidecar, frame = read_spectrum_table(data_path)
    assert sidecar.product == "energy_spectrum"
    assert sidecar.units["absorbed_energy"] == "J"
    assert list(frame.columns) == [
        "drive_frequency_hz",
        "rms_velocity",
        "absorbed_energy",
        "phase_trace_t0",
        "amplitude_t0",
    ]


def test_custom_stem(be9_mode, drive, scan, tmp_path):
    spectrum = rms_spectrum([be9_mode], drive, scan, WINDOW)
    data_path, meta_path = write_spectra([spectrum], tmp_path, "rms_spectrum", "rms_spectrum_td1")
    assert data_path.name == "rms_spectrum_td1.csv"
    assert meta_path.name == "rms_spectrum_td1.meta.json"


def test_nothing_to_write(tmp_path):
    with pytest.raises(OutputError):
        write_spectra([], tmp_path, "rms_spectrum")


def test_foreign_sidecar(be9_mode, drive, scan, tmp_path):
    spectrum = rms_spectrum([be9_mode], drive, scan, WINDOW)
    data_path, meta_path = write_spectra([spectrum], tmp_path, "rms_spectrum")
    meta_path.write_text(json.dumps({"product": "residual_grid"}))
    with pytest.raises(UnknownProductError):
        read_spectrum_table(data_path)


def test_report_file(be9_mode, drive, tmp_path):
    pair = [
        ModeParams(omega_z=be9_mode.omega_z - 2e4, mass=be9_mode.mass, weight=0.5),
        ModeParams(omega_z=be9_mode.omega_z + 2e4, mass=be9_mode.mass, weight=0.5),
    ]
    grid = be9_mode.omega_z + np.linspace(-1e5, 1e5, 401)
    report = resolvability(pair, drive, grid, WINDOW)
    path = write_report(report, tmp_path / "resolvability.json", {"scenario": "test"})
    document = json.loads(path.read_text())
    assert document["product"] == "resolvability"
    assert document["report"]["peak_count"] == report.peak_count
    assert document["metadata"]["scenario"] == "test"


def test_force_fit_file(tmp_path):
    fit = ForceFit(
        force=1e-22,
        omega_z=5.4e6,
        covariance=np.diag([1e-48, 4.0]),
        reduced_chi2=1.1,
        n_points=41,
        n_starts=26,
        source="residual_grid",
        used_phase=True,
        cost=20.0,
    )
    path = write_force_fit(fit, tmp_path / "force_fit.json", {"force": 1e-22})
    document = json.loads(path.read_text())
    assert document["fit"]["force_sigma"] == pytest.approx(1e-24)
    assert document["fit"]["omega_z_sigma"] == pytest.approx(2.0)
    assert document["truth"]["force"] == 1e-22
