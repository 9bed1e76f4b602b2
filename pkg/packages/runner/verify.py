"""Declarative verification of a run against a scenario's expectations.

Every check measures one number from an emitted product (or from the
closed forms, for checks that need no product) and compares it with the
expected value. A check whose product is missing or unreadable is marked
``error``; it is never skipped silently.
"""

import json
import logging
import math
from collections.abc import Callable
from pathlib import Path

import numpy as np
from scipy import stats

from packages.core.dynamics import signed_amplitude
from packages.core.errors import VelocimetryError
from packages.detection.bands import band_period, fit_band
from packages.detection.background import undriven_cdf
from packages.detection.output import read_arrivals, read_grid
from packages.spectroscopy.output import PRIMARY_COLUMN, read_spectra, read_spectrum_table
from packages.spectroscopy.peaks import find_resonance_peaks, fwhm, has_zigzag, trough_depth
from packages.spectroscopy.spectra import sidelobe_nulls

from .config import ExpectationSpec, Scenario
from .errors import ExpectationError
from .models import CheckResult, RunManifest, VerificationReport
from .runner import check_manifest, read_manifest, run_directory

logger = logging.getLogger(__name__)

# Resonance rows used for band-phase slopes: central lobe above this fraction of the peak
_CENTRAL_LOBE = 0.5
# Number of sidelobe nulls inspected by null_depth
_NULL_ORDERS = 5


class _ProductFiles:
    """Locates product data files of a run."""

    def __init__(self, manifest: RunManifest, directory: Path):
        self.manifest = manifest
        self.directory = directory

    def data_path(self, stem: str) -> Path:
        for entry in self.manifest.files:
            path = Path(entry.path)
            if path.stem == stem and path.suffix in (".csv", ".json"):
                return self.directory / path
        raise FileNotFoundError(f"Product {stem!r} not found in manifest")


def _spectrum_column(files: _ProductFiles, spec: ExpectationSpec):
    sidecar, frame = read_spectrum_table(files.data_path(spec.product))
    column = spec.column or PRIMARY_COLUMN[sidecar.product]
    return sidecar, frame, frame[column].to_numpy(dtype=float)


def _peak_location(scenario, files, spec) -> float:
    _, frame, values = _spectrum_column(files, spec)
    peaks = find_resonance_peaks(values, min_height=spec.min_height)
    best = peaks[int(np.argmax(values[peaks]))]
    return float(frame["drive_frequency_hz"].iloc[best])


def _peak_count(scenario, files, spec) -> float:
    _, _, values = _spectrum_column(files, spec)
    return float(find_resonance_peaks(values, min_height=spec.min_height).size)


def _linewidth_ratio(scenario, files, spec) -> float:
    if not spec.reference:
        raise ExpectationError("linewidth_ratio needs a reference product", "reference")
    _, frame, values = _spectrum_column(files, spec)
    reference = spec.model_copy(update={"product": spec.reference})
    _, ref_frame, ref_values = _spectrum_column(files, reference)
    width = fwhm(frame["drive_frequency_hz"].to_numpy(), values)
    ref_width = fwhm(ref_frame["drive_frequency_hz"].to_numpy(), ref_values)
    return width / ref_width


def _null_depth(scenario, files, spec) -> float:
    mode, drive = scenario.modes[0], scenario.drive
    nulls = sidelobe_nulls(mode, drive, _NULL_ORDERS)
    at_nulls = signed_amplitude(mode.omega_z, mode.mass, mode.weight, drive.force, nulls, drive.t_d)
    peak = mode.weight * drive.force * drive.t_d / (2.0 * mode.mass)
    return float(np.max(np.abs(at_nulls)) / peak)


def _slope_in_central_lobe(omega, phase, amplitude) -> float:
    lobe = amplitude >= _CENTRAL_LOBE * np.max(amplitude)
    peak = int(np.argmax(amplitude))
    # Contiguous run of the lobe around the peak
    lo = peak
    while lo > 0 and lobe[lo - 1]:
        lo -= 1
    hi = peak
    while hi < lobe.size - 1 and lobe[hi + 1]:
        hi += 1
    if hi - lo < 2:
        raise ExpectationError("central lobe spans fewer than three grid points")
    sl = slice(lo, hi + 1)
    slope, _ = np.polyfit(omega[sl], np.unwrap(phase[sl]), 1)
    return float(slope)


def _phase_slope(scenario, files, spec) -> float:
    """Phase slope versus drive frequency in units of t_d / 2."""
    half_td = scenario.drive.t_d / 2.0
    if spec.product == "residual_grid":
        grid = read_grid(files.data_path("residual_grid"))
        omega_z = scenario.modes[0].omega_z
        rows = np.flatnonzero(grid.valid_rows)
        phases, amplitudes = [], []
        for row in rows:
            band = fit_band(
                grid.residuals[row], grid.fitted[row], grid.time_bins, omega_z,
                t_ref=float(grid.detection_offsets[row]), bin_width=grid.bin_width,
            )
            # Remove the start-pulse timing so the phase is drive-referenced
            phases.append(band.phase - omega_z * (grid.gate_origins[row] - scenario.drive.t_d))
            amplitudes.append(band.amplitude)
        omega = np.asarray(grid.drive_frequencies)[rows]
        return _slope_in_central_lobe(omega, np.array(phases), np.array(amplitudes)) / half_td

    _, frame = read_spectrum_table(files.data_path(spec.product))
    omega = 2.0 * math.pi * frame["drive_frequency_hz"].to_numpy()
    slope = _slope_in_central_lobe(
        omega, frame["phase_trace_t0"].to_numpy(), frame["amplitude_t0"].to_numpy()
    )
    return slope / half_td


def _zigzag(scenario, files, spec) -> float:
    _, frame = read_spectrum_table(files.data_path(spec.product))
    found = has_zigzag(
        2.0 * math.pi * frame["drive_frequency_hz"].to_numpy(),
        frame["phase_trace_t0"].to_numpy(),
        scenario.drive.t_d,
        amplitude=frame["amplitude_t0"].to_numpy(),
    )
    return 1.0 if found else 0.0


def _trough_order(scenario, files, spec) -> float:
    """Coherent minus incoherent trough depth."""
    _, frame = read_spectrum_table(files.data_path(spec.product))
    rms = frame["rms_velocity"].to_numpy()
    energy = frame["absorbed_energy"].to_numpy()
    coherent = trough_depth(rms, find_resonance_peaks(rms, min_height=spec.min_height))
    incoherent = trough_depth(energy, find_resonance_peaks(energy, min_height=spec.min_height))
    return coherent - incoherent


def _center_index(scenario, spectrum, spec) -> int:
    target = (
        2.0 * math.pi * spec.frequency_hz
        if spec.frequency_hz
        else float(np.mean([m.omega_z for m in scenario.modes]))
    )
    return int(np.argmin(np.abs(np.asarray(spectrum.freq_grid) - target)))


def _offset_response(scenario, files, spec) -> tuple[float, float, float]:
    spectra = read_spectra(files.data_path(spec.product))
    if len(spectra) < 3:
        raise ExpectationError("offset checks need three offsets (0, half period, period)")
    index = _center_index(scenario, spectra[0], spec)
    return tuple(float(s.rms_velocity[index]) for s in spectra[:3])


def _offset_suppression(scenario, files, spec) -> float:
    """Response at the second offset relative to the first."""
    base, half, _ = _offset_response(scenario, files, spec)
    return half / base


def _offset_periodicity(scenario, files, spec) -> float:
    """Relative change of the response after one full period of offset."""
    base, _, full = _offset_response(scenario, files, spec)
    return abs(full - base) / base


def _ks_pvalue(scenario, files, spec) -> float:
    """KS p-value of the run's arrival times against the undriven first-photon law."""
    sidecar, frame = read_arrivals(files.data_path(spec.product or "arrivals"))
    if frame.empty:
        raise ExpectationError("arrival table is empty")
    offsets = np.asarray(sidecar.detection_offsets_s)[frame["row"].to_numpy(dtype=int)]
    uniforms = undriven_cdf(frame["arrival_time_s"].to_numpy(), offsets, scenario.detection)
    return float(stats.kstest(uniforms, "uniform").pvalue)


def _standardized_residuals(files) -> np.ndarray:
    grid = read_grid(files.data_path("residual_grid"))
    rows = grid.valid_rows
    fitted = grid.fitted[rows]
    usable = fitted > 0
    return (grid.residuals[rows][usable] / np.sqrt(fitted[usable])).ravel()


def _zero_mean(scenario, files, spec) -> float:
    """RMS over rows of the residual demodulated at the mode frequency, in standard errors.

    Both quadratures of an undriven row average to zero, so the statistic
    stays near 1; a band at the mode frequency drives it up.
    """
    grid = read_grid(files.data_path("residual_grid"))
    omega_z = scenario.modes[0].omega_z
    scores = []
    for row in np.flatnonzero(grid.valid_rows):
        band = fit_band(grid.residuals[row], grid.fitted[row], grid.time_bins, omega_z)
        if band.phasor_sigma > 0:
            scores.append(abs(band.phasor) ** 2 / (2.0 * band.phasor_sigma**2))
    if not scores:
        raise ExpectationError("residual grid has no usable rows")
    return float(math.sqrt(np.mean(scores)))


def _outlier_fraction(scenario, files, spec) -> float:
    z = _standardized_residuals(files)
    return float(np.mean(np.abs(z) > 3.0))


def _band_period(scenario, files, spec) -> float:
    """Band period (s) of the row with the strongest band at the mode frequency."""
    grid = read_grid(files.data_path("residual_grid"))
    omega_z = scenario.modes[0].omega_z
    rows = np.flatnonzero(grid.valid_rows)
    strengths = [
        fit_band(grid.residuals[r], grid.fitted[r], grid.time_bins, omega_z).amplitude
        for r in rows
    ]
    row = rows[int(np.argmax(strengths))]
    return band_period(
        grid.residuals[row], grid.fitted[row], grid.time_bins, 0.5 * omega_z, 1.5 * omega_z
    )


def _force_recovery(scenario, files, spec) -> float:
    """Fitted over true force."""
    document = json.loads(files.data_path(spec.product or "force_fit").read_text("utf-8"))
    return document["fit"]["force"] / document["truth"]["force"]


CHECKS: dict[str, Callable[[Scenario, _ProductFiles, ExpectationSpec], float]] = {
    "peak_location": _peak_location,
    "peak_count": _peak_count,
    "linewidth_ratio": _linewidth_ratio,
    "null_depth": _null_depth,
    "phase_slope": _phase_slope,
    "zigzag": _zigzag,
    "trough_order": _trough_order,
    "offset_suppression": _offset_suppression,
    "offset_periodicity": _offset_periodicity,
    "ks_pvalue": _ks_pvalue,
    "zero_mean": _zero_mean,
    "outlier_fraction": _outlier_fraction,
    "band_period": _band_period,
    "force_recovery": _force_recovery,
}

# Checks evaluated from closed forms rather than emitted files
PRODUCT_FREE = {"null_depth"}


def compare(measured: float, spec: ExpectationSpec) -> bool:
    """Apply the expectation's comparison to a measured value."""
    if spec.comparison == "at_most":
        return measured <= spec.expected
    if spec.comparison == "at_least":
        return measured >= spec.expected
    if spec.comparison == "equals":
        return measured == spec.expected
    allowed = 0.0
    if spec.tolerance is not None:
        allowed = max(allowed, spec.tolerance)
    if spec.rel_tolerance is not None:
        allowed = max(allowed, spec.rel_tolerance * abs(spec.expected))
    return abs(measured - spec.expected) <= allowed


def selected(spec: ExpectationSpec, only: str | None) -> bool:
    """Whether ``--only`` picks this check (name or kind, exact or prefix)."""
    if not only:
        return True
    return any(value == only or value.startswith(only) for value in (spec.name, spec.kind))


def evaluate(scenario: Scenario, files: _ProductFiles, spec: ExpectationSpec) -> CheckResult:
    """Run one check; failures to measure become ``error`` results."""
    result = CheckResult(
        name=spec.name,
        kind=spec.kind,
        product=spec.product,
        status="error",
        expected=spec.expected,
        comparison=spec.comparison,
        tolerance=spec.tolerance,
        rel_tolerance=spec.rel_tolerance,
    )
    if spec.kind not in PRODUCT_FREE and spec.product:
        if spec.product not in scenario.outputs and not any(
            Path(f.path).stem == spec.product for f in files.manifest.files
        ):
            result.message = f"product {spec.product!r} was not emitted"
            return result
        failed = {p.name for p in files.manifest.products if not p.success}
        base = spec.product.split("_td")[0]
        if base in failed:
            result.message = f"product {base!r} failed"
            return result
    try:
        measured = CHECKS[spec.kind](scenario, files, spec)
    except (VelocimetryError, OSError, ValueError, KeyError) as e:
        result.message = f"{type(e).__name__}: {e}"
        return result

    result.measured = measured
    result.status = "pass" if compare(measured, spec) else "fail"
    return result


def verify(
    scenario: Scenario,
    out_dir: Path | str | None = None,
    *,
    only: str | None = None,
    manifest: RunManifest | None = None,
) -> VerificationReport:
    """Evaluate the scenario's expectations against its run directory.

    Raises:
        ExpectationError: the scenario declares no expectations, or ``only``
            matches none of them
    """
    if not scenario.expectations:
        raise ExpectationError(
            f"Scenario {scenario.name} has no expectations block", "expectations"
        )
    specs = [s for s in scenario.expectations if selected(s, only)]
    if not specs:
        raise ExpectationError(f"No check matches {only!r}", "expectations")

    directory = run_directory(scenario, out_dir)
    manifest = manifest or read_manifest(directory)
    mismatched = check_manifest(manifest, directory)
    for path in mismatched:
        logger.error(f"Checksum mismatch: {path}")

    files = _ProductFiles(manifest, directory)
    report = VerificationReport(
        scenario=scenario.name,
        scenario_hash=scenario.scenario_hash,
        manifest_ok=not mismatched and manifest.scenario_hash == scenario.scenario_hash,
        checks=[evaluate(scenario, files, spec) for spec in specs],
    )
    logger.info(f"Verification of {scenario.name}: {report.counts}")
    return report


def write_report(report: VerificationReport, path: Path | str) -> Path:
    path = Path(path)
    path.write_text(report.model_dump_json(indent=2), encoding="utf-8")
    return path
