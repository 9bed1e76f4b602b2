"""End-to-end acceptance checks: closed forms, Monte Carlo and bundled scenarios."""

import dataclasses
import math

import numpy as np
import pytest
from scipy import stats

from packages.core.constants import BE9_MASS, DETECTION_WAVELENGTH, YOCTONEWTON
from packages.core.dynamics import signed_amplitude, trajectory
from packages.core.lamb_dicke import lamb_dicke
from packages.core.models import DriveConfig, LambDickeInputs, ModeParams
from packages.core.oracle import max_step, ode_oracle
from packages.detection.background import undriven_cdf
from packages.detection.bands import fit_band
from packages.detection.fluorescence import rest_rate
from packages.detection.sampler import sample_first_photons
from packages.detection.sweep import run_sweep, simulate_row
from packages.runner.config import frequency_grid, list_scenarios, load_scenario
from packages.runner.runner import run, run_directory
from packages.runner.verify import verify
from packages.spectroscopy.fitting import extract_force
from packages.spectroscopy.peaks import (
    find_resonance_peaks,
    has_zigzag,
    linewidth,
    trough_depth,
)
from packages.spectroscopy.spectra import (
    energy_spectrum,
    offset_scan,
    rms_spectrum,
    sidelobe_nulls,
)

pytestmark = pytest.mark.integration

OMEGA_0 = 2.0 * math.pi * 867.0e3
BUNDLED = list_scenarios()
WITH_EXPECTATIONS = [s.name for s in BUNDLED if s.expectations]


def _pair(spacing: float) -> list[ModeParams]:
    return [
        ModeParams(omega_z=OMEGA_0 - spacing / 2.0, mass=BE9_MASS),
        ModeParams(omega_z=OMEGA_0 + spacing / 2.0, mass=BE9_MASS),
    ]


def test_lamb_dicke_value():
    eta = lamb_dicke(
        LambDickeInputs(
            mass=BE9_MASS,
            omega_z=OMEGA_0,
            wavevector=2.0 * math.pi / DETECTION_WAVELENGTH,
            half_angle=math.radians(0.75),
            nbar=23.0,
        )
    )
    assert eta == pytest.approx(0.07, rel=0.1)


def test_phase_slope_is_half_drive_time(be9_mode, drive):
    grid = OMEGA_0 + 2.0 * math.pi * np.linspace(-3000.0, 3000.0, 241)
    spectrum = rms_spectrum([be9_mode], drive, grid, 40e-6)
    lobe = spectrum.amplitude_t0 >= 0.5 * spectrum.amplitude_t0.max()
    slope, _ = np.polyfit(grid[lobe], np.unwrap(spectrum.phase_trace_t0[lobe]), 1)
    assert slope == pytest.approx(drive.t_d / 2.0, rel=0.01)


def test_linewidth_scales_inversely_with_drive_time(be9_mode, drive):
    ratio = linewidth(be9_mode, drive) / linewidth(be9_mode, drive.with_duration(2 * drive.t_d))
    assert ratio == pytest.approx(2.0, rel=0.02)


def test_sidelobe_nulls(be9_mode, drive):
    nulls = sidelobe_nulls(be9_mode, drive, 5)
    values = signed_amplitude(
        be9_mode.omega_z, be9_mode.mass, be9_mode.weight, drive.force, nulls, drive.t_d
    )
    peak = drive.force * drive.t_d / (2.0 * be9_mode.mass)
    assert np.max(np.abs(values)) < 1e-12 * peak


@pytest.mark.slow
def test_oracle_matches_closed_form():
    """100 random near-resonant parameter sets agree within 1% of the peak."""
    rng = np.random.default_rng(20240611)
    for _ in range(100):
        omega_z = OMEGA_0 * rng.uniform(0.9, 1.1)
        mode = ModeParams(omega_z=omega_z, mass=BE9_MASS)
        drive = DriveConfig(
            force=rng.uniform(10.0, 200.0) * YOCTONEWTON,
            omega_d=omega_z * (1.0 + rng.uniform(-0.01, 0.01)),
            t_d=rng.uniform(50e-6, 200e-6),
            psi=rng.uniform(0.0, 2.0 * math.pi),
        )
        oracle = ode_oracle(mode, drive, drive.t_d, max_step(mode, drive))
        closed = trajectory(mode, drive, oracle.times)
        peak = np.max(np.abs(closed))
        assert np.max(np.abs(oracle.positions - closed)) < 0.01 * peak, drive


def test_undriven_arrivals_are_exponential(detection):
    rng = np.random.default_rng(np.random.SeedSequence(99))
    times = sample_first_photons(np.zeros_like, detection, 100_000, rng)
    times = times[~np.isnan(times)]
    rate = rest_rate(detection)
    norm = -math.expm1(-rate * detection.window)
    result = stats.kstest(times, lambda t: -np.expm1(-rate * np.asarray(t)) / norm)
    assert result.pvalue > 0.01


def test_undriven_sweep_arrivals_follow_rest_law(be9_mode, drive, detection):
    """Recorded arrivals of an undriven sweep pass the KS test against the rest-rate law."""
    still = dataclasses.replace(drive, force=0.0)
    freq_grid = frequency_grid(866000.0, 868000.0, 1000.0)
    grid = run_sweep([be9_mode], still, detection, freq_grid, 40_000, seed=8)
    offsets = np.concatenate(
        [np.full(len(a), o) for a, o in zip(grid.arrivals, grid.detection_offsets)]
    )
    times = np.concatenate([a.arrival_times for a in grid.arrivals])
    assert times.size > 70_000
    uniforms = undriven_cdf(times, offsets, detection)
    assert stats.kstest(uniforms, "uniform").pvalue > 0.01


def test_damping_visible_after_10us(be9_mode, drive, detection):
    """With gamma = 1e5 1/s the band fitted on simulated arrivals falls to 1/e at 10 us."""
    damped = dataclasses.replace(
        detection, damping_rate=1.0e5, lineshape="linear", dead_time=1.2e-6, window=30e-6
    )
    row = simulate_row([be9_mode], drive, damped, be9_mode.omega_z, 1_500_000, seed=17, row=0)
    assert row.error is None
    band = fit_band(
        row.residuals,
        row.fitted,
        damped.bin_centers,
        be9_mode.omega_z,
        t_ref=row.detection_offset,
        bin_width=damped.bin_width,
        free_decay=True,
    )
    assert math.exp(-band.decay_rate * 10e-6) == pytest.approx(math.exp(-1.0), rel=0.15)


class TestTwoModes:
    def test_coherent_trough_deeper_than_energy_trough(self):
        drive = DriveConfig(force=100.0 * YOCTONEWTON, omega_d=OMEGA_0, t_d=1e-3)
        modes = _pair(2.0 * math.pi / drive.t_d)
        grid = frequency_grid(863000.0, 871000.0, 20.0)
        rms = rms_spectrum(modes, drive, grid, 40e-6).rms_velocity
        energy = energy_spectrum(modes, drive, grid)
        coherent = trough_depth(rms, find_resonance_peaks(rms))
        incoherent = trough_depth(energy, find_resonance_peaks(energy))
        assert coherent > incoherent

    def test_unresolved_pair_shows_zigzag(self):
        drive = DriveConfig(force=100.0 * YOCTONEWTON, omega_d=OMEGA_0, t_d=1e-3)
        modes = _pair(0.25 * 2.0 * math.pi / drive.t_d)
        grid = frequency_grid(863000.0, 871000.0, 20.0)
        spectrum = rms_spectrum(modes, drive, grid, 40e-6)
        energy = energy_spectrum(modes, drive, grid)
        assert find_resonance_peaks(energy).size == 1
        assert has_zigzag(grid, spectrum.phase_trace_t0, drive.t_d, spectrum.amplitude_t0)

    def test_offset_interference(self):
        spacing = 2.0 * math.pi * 50.0
        drive = DriveConfig(force=100.0 * YOCTONEWTON, omega_d=OMEGA_0, t_d=1e-3)
        modes = _pair(spacing)
        offsets = [0.0, math.pi / spacing, 2.0 * math.pi / spacing]
        grid = frequency_grid(866900.0, 867100.0, 100.0)
        spectra = offset_scan(modes, drive, offsets, grid, 40e-6)
        base, half, full = (float(s.rms_velocity[1]) for s in spectra)
        assert half <= 0.1 * base
        assert abs(full - base) <= 1e-9 * base


@pytest.mark.slow
def test_force_closed_loop(be9_mode, detection):
    """Mean recovered force over 100 seeds is within 3% of the 100 yN drive."""
    drive = DriveConfig(force=100.0 * YOCTONEWTON, omega_d=OMEGA_0, t_d=200e-6)
    grid = frequency_grid(852000.0, 882000.0, 1500.0)
    ratios = []
    for seed in range(100):
        residuals = run_sweep([be9_mode], drive, detection, grid, 5000, seed)
        fit = extract_force(residuals, be9_mode, drive, detection, n_starts=9)
        ratios.append(fit.force / drive.force)
    assert abs(np.mean(ratios) - 1.0) < 0.03


@pytest.mark.slow
@pytest.mark.parametrize("name", WITH_EXPECTATIONS)
def test_bundled_scenario_verifies(name, tmp_path):
    scenario = load_scenario(name)
    manifest = run(scenario, tmp_path, jobs=4)
    assert manifest.success, manifest.failed_products
    report = verify(scenario, tmp_path, manifest=manifest)
    failing = [c for c in report.checks if not c.passed]
    assert report.passed, failing


@pytest.mark.slow
@pytest.mark.parametrize("name", [s.name for s in BUNDLED])
def test_bundled_scenario_reproducible(name, tmp_path):
    scenario = load_scenario(name)
    run(scenario, tmp_path / "serial", jobs=1)
    run(scenario, tmp_path / "parallel", jobs=4)
    serial = run_directory(scenario, tmp_path / "serial")
    parallel = run_directory(scenario, tmp_path / "parallel")
    names = sorted(p.name for p in serial.iterdir() if p.name != "manifest.json")
    assert names == sorted(p.name for p in parallel.iterdir() if p.name != "manifest.json")
    for file_name in names:
        assert (serial / file_name).read_bytes() == (parallel / file_name).read_bytes()
