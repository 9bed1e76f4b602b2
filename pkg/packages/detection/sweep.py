"""Drive-frequency sweeps of the gated first-photon measurement.

Each row retunes the drive, runs ``reps`` first-photon repetitions with the
post-drive multimode velocity, gates the photon times against the beat-note
start pulses, histograms them and removes the exponential background.

Time coordinates: the drive runs over [0, t_d], detection starts at
t_d + t_offset. Start pulses fire where the drive phase omega_d t + psi
crosses a multiple of 2 pi.
"""

import asyncio
import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from packages.core.dynamics import check_validity, phase_offset, signed_amplitude
from packages.core.errors import InvalidParameterError
from packages.core.models import DriveConfig, ModeParams, require_finite

from .background import fit_exponential_background, histogram_arrivals
from .errors import FitFailureError
from .gate import gate_origin, tac_gate
from .models import DetectionConfig, ResidualGrid, RowArrivals
from .sampler import sample_first_photons
from .seeds import row_generator, row_seed

logger = logging.getLogger(__name__)


@dataclass
class RowResult:
    """Outcome of one sweep row."""

    row: int
    omega_d: float
    counts: np.ndarray
    fitted: np.ndarray
    residuals: np.ndarray
    fit_params: tuple[float, float] | None
    error: str | None
    seed_word: int
    gate_origin: float
    detection_offset: float
    arrivals: RowArrivals


def make_velocity_fn(modes: Sequence[ModeParams], drive: DriveConfig, t_offset: float = 0.0):
    """Vectorized detection-time velocity of the driven modes.

    Same sum as ``multimode_velocity``; the per-mode factors are evaluated once
    so the sampler can call it repeatedly.
    """
    if not modes:
        raise InvalidParameterError("at least one mode is required", "modes")
    omega_z = np.array([m.omega_z for m in modes])
    for w in omega_z:
        check_validity(w, drive.omega_d)
    amplitude = signed_amplitude(
        omega_z,
        np.array([m.mass for m in modes]),
        np.array([m.weight for m in modes]),
        drive.force,
        drive.omega_d,
        drive.t_d,
    )
    phase = phase_offset(omega_z, drive.omega_d, drive.t_d) + drive.psi
    elapsed = t_offset + drive.t_d

    def velocity(t):
        t = np.asarray(t, dtype=float)[..., None]
        return np.sum(amplitude * np.sin(omega_z * (t + elapsed) + phase), axis=-1)

    return velocity


def simulate_row(
    modes: Sequence[ModeParams],
    drive: DriveConfig,
    det: DetectionConfig,
    omega_d: float,
    reps: int,
    seed: int,
    row: int,
    t_offset: float = 0.0,
) -> RowResult:
    """Run one drive frequency. Background-fit failures are returned, not raised."""
    row_drive = drive.at(omega_d)
    rng = row_generator(seed, row)
    velocity_fn = make_velocity_fn(modes, row_drive, t_offset)

    first = sample_first_photons(velocity_fn, det, reps, rng)
    hit = np.flatnonzero(~np.isnan(first))

    beat_period = 2.0 * math.pi / omega_d
    drive_end = row_drive.t_d
    nominal_origin = -row_drive.psi / omega_d
    origins = nominal_origin
    if det.beat_phase_jitter > 0:
        # One draw per repetition, after sampling, so the draw order is fixed
        jitter = rng.normal(0.0, det.beat_phase_jitter, size=reps)
        origins = nominal_origin - jitter[hit] / omega_d

    photon_time = drive_end + t_offset + first[hit]
    arrivals = tac_gate(beat_period, drive_end, photon_time, origin=origins)
    arrivals = np.atleast_1d(arrivals)
    accepted = arrivals >= det.dead_time
    row_arrivals = RowArrivals(arrival_times=arrivals[accepted], repetition_indices=hit[accepted])

    g = gate_origin(beat_period, drive_end, nominal_origin)
    counts = histogram_arrivals(row_arrivals.arrival_times, det)
    centers = det.bin_centers
    try:
        fit = fit_exponential_background(counts, centers)
        fitted, residuals = fit.fitted, fit.residuals
        fit_params, error = (fit.amplitude, fit.tau), None
    except FitFailureError as e:
        logger.warning(f"Row {row} ({omega_d / (2 * math.pi):.1f} Hz): {e}")
        fitted = np.full_like(counts, np.nan)
        residuals = np.full_like(counts, np.nan)
        fit_params, error = None, str(e)

    logger.debug(
        f"Row {row}: f_d={omega_d / (2 * math.pi):.1f} Hz, "
        f"{len(row_arrivals)} arrivals of {reps} reps"
    )
    return RowResult(
        row=row,
        omega_d=omega_d,
        counts=counts,
        fitted=fitted,
        residuals=residuals,
        fit_params=fit_params,
        error=error,
        seed_word=row_seed(seed, row),
        gate_origin=g,
        detection_offset=drive_end + t_offset - g,
        arrivals=row_arrivals,
    )


def _validate(freq_grid, reps: int, seed: int, t_offset: float) -> np.ndarray:
    grid = np.asarray(freq_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise InvalidParameterError("freq_grid must be a nonempty list", "freq_grid")
    if not np.all(np.isfinite(grid)) or np.any(grid <= 0):
        raise InvalidParameterError("freq_grid must hold positive frequencies", "freq_grid")
    if int(reps) < 1:
        raise InvalidParameterError("reps must be at least 1", "reps")
    if not 0 <= int(seed) < 2**64:
        raise InvalidParameterError("seed must be an unsigned 64-bit integer", "seed")
    if require_finite("t_offset", t_offset) < 0:
        raise InvalidParameterError("t_offset must be non-negative", "t_offset")
    return grid


def _assemble(
    rows: list[RowResult],
    modes: Sequence[ModeParams],
    drive: DriveConfig,
    det: DetectionConfig,
    reps: int,
    seed: int,
    t_offset: float,
) -> ResidualGrid:
    rows = sorted(rows, key=lambda r: r.row)
    grid = ResidualGrid(
        drive_frequencies=np.array([r.omega_d for r in rows]),
        time_bins=det.bin_centers,
        residuals=np.vstack([r.residuals for r in rows]),
        counts=np.vstack([r.counts for r in rows]),
        fitted=np.vstack([r.fitted for r in rows]),
        fit_params=[r.fit_params for r in rows],
        row_errors=[r.error for r in rows],
        row_seeds=[r.seed_word for r in rows],
        gate_origins=np.array([r.gate_origin for r in rows]),
        detection_offsets=np.array([r.detection_offset for r in rows]),
        reps=int(reps),
        seed=int(seed),
        metadata={
            "modes": [
                {"omega_z": m.omega_z, "mass": m.mass, "weight": m.weight} for m in modes
            ],
            "drive": {"force": drive.force, "t_d": drive.t_d, "psi": drive.psi},
            "detection": det.as_dict(),
            "t_offset": t_offset,
            "seed_rule": "numpy SeedSequence(seed, spawn_key=(row,))",
        },
        arrivals=[r.arrivals for r in rows],
    )
    failed = grid.failed_rows
    logger.info(
        f"Sweep finished: {len(rows)} rows x {reps} reps, "
        f"{len(failed)} failed background fits"
    )
    return grid


async def run_sweep_async(
    modes: Sequence[ModeParams],
    drive: DriveConfig,
    det: DetectionConfig,
    freq_grid,
    reps: int,
    seed: int,
    *,
    t_offset: float = 0.0,
    jobs: int = 1,
) -> ResidualGrid:
    """Run all rows in worker threads, at most ``jobs`` at a time.

    Rows draw from their own seeded streams, so the grid is identical to a
    serial run for any ``jobs``.
    """
    grid = _validate(freq_grid, reps, seed, t_offset)
    semaphore = asyncio.Semaphore(max(1, int(jobs)))

    async def run_row(row: int, omega_d: float) -> RowResult:
        async with semaphore:
            return await asyncio.to_thread(
                simulate_row, modes, drive, det, float(omega_d), int(reps), int(seed), row, t_offset
            )

    rows = await asyncio.gather(*(run_row(i, w) for i, w in enumerate(grid)))
    return _assemble(list(rows), modes, drive, det, reps, seed, t_offset)


def run_sweep(
    modes: Sequence[ModeParams],
    drive: DriveConfig,
    det: DetectionConfig,
    freq_grid,
    reps: int,
    seed: int,
    *,
    t_offset: float = 0.0,
    jobs: int = 1,
) -> ResidualGrid:
    """Residual grid over ``freq_grid`` (rad/s). Serial unless jobs > 1."""
    if jobs > 1:
        return asyncio.run(
            run_sweep_async(
                modes, drive, det, freq_grid, reps, seed, t_offset=t_offset, jobs=jobs
            )
        )
    grid = _validate(freq_grid, reps, seed, t_offset)
    rows = [
        simulate_row(modes, drive, det, float(w), int(reps), int(seed), i, t_offset)
        for i, w in enumerate(grid)
    ]
    return _assemble(rows, modes, drive, det, reps, seed, t_offset)
