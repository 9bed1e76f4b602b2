"""Drive-force extraction by fitting the closed-form resonance.

Both data sources reduce to complex velocity phasors per drive frequency,

    q(omega_d) = v(omega_d; F, omega_z) exp(i (A + B omega_z))

with v the signed closed-form amplitude. For a spectrum A = omega_d L and
B = -L with L = t_d / 2 + t_offset. For a residual grid the phasor is the
band fitted in gated arrival time, so A = omega_d t_d / 2 + psi and
B = g - t_d / 2 where g is the row's accepted start-pulse time.

F and omega_z are fitted with bounded trust-region least squares, an analytic
Jacobian and a fixed multi-start schedule over omega_z.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares

from packages.config import settings
from packages.core.dynamics import sinc
from packages.core.errors import InvalidParameterError
from packages.core.models import DriveConfig, ModeParams
from packages.detection.bands import fit_band
from packages.detection.errors import FitFailureError
from packages.detection.fluorescence import doppler_slope
from packages.detection.models import DetectionConfig, ResidualGrid

from .models import ForceFit, SpectrumResult

logger = logging.getLogger(__name__)

MIN_POINTS = 10
# sinc'(h) switches to its Taylor series below this |h|
_SERIES_LIMIT = 1e-4


def _sinc_derivative(h: np.ndarray) -> np.ndarray:
    h = np.asarray(h, dtype=float)
    small = np.abs(h) < _SERIES_LIMIT
    safe = np.where(small, 1.0, h)
    return np.where(small, -h / 3.0, (np.cos(safe) - sinc(safe)) / safe)


@dataclass
class _PhasorProblem:
    """Observed phasors and the fixed parts of their model."""

    omega_d: np.ndarray
    observed: np.ndarray
    sigma: np.ndarray
    phase_const: np.ndarray
    phase_slope: np.ndarray
    mass: float
    weight: float
    t_d: float
    use_phase: bool

    def amplitude(self, force: float, omega_z: float):
        """Signed amplitude and its derivatives in force and omega_z."""
        total = omega_z + self.omega_d
        h = (omega_z - self.omega_d) * self.t_d / 2.0
        s = sinc(h)
        scale = self.weight * self.omega_d * self.t_d / self.mass
        v = force * scale * s / total
        dv_dforce = scale * s / total
        dv_domega = force * scale * (-s / total**2 + _sinc_derivative(h) * self.t_d / (2.0 * total))
        return v, dv_dforce, dv_domega

    def residual_and_jacobian(self, force: float, omega_z: float):
        v, dv_dforce, dv_domega = self.amplitude(force, omega_z)
        if not self.use_phase:
            sign = np.where(v < 0, -1.0, 1.0)
            residual = (np.abs(v) - np.abs(self.observed)) / self.sigma
            jac = np.column_stack([sign * dv_dforce, sign * dv_domega]) / self.sigma[:, None]
            return residual, jac

        rotation = np.exp(1j * (self.phase_const + self.phase_slope * omega_z))
        model = v * rotation
        d_force = dv_dforce * rotation
        d_omega = (dv_domega + 1j * self.phase_slope * v) * rotation
        diff = (model - self.observed) / self.sigma
        residual = np.concatenate([diff.real, diff.imag])
        jac = np.vstack(
            [
                np.column_stack([d_force.real, d_omega.real]),
                np.column_stack([d_force.imag, d_omega.imag]),
            ]
        ) / np.concatenate([self.sigma, self.sigma])[:, None]
        return residual, jac

    def best_force(self, omega_z: float) -> float:
        """Force minimising the residual for fixed omega_z (the model is linear in F)."""
        _, unit, _ = self.amplitude(1.0, omega_z)
        w = 1.0 / self.sigma**2
        if self.use_phase:
            unit = unit * np.exp(1j * (self.phase_const + self.phase_slope * omega_z))
            num = np.sum(w * np.real(np.conj(unit) * self.observed))
        else:
            num = np.sum(w * np.abs(unit) * np.abs(self.observed))
        den = np.sum(w * np.abs(unit) ** 2)
        return max(float(num / den), 0.0) if den > 0 else 0.0


def _solve(
    problem: _PhasorProblem,
    starts: np.ndarray,
    bounds: tuple[float, float],
    max_nfev: int,
):
    """Multi-start fit; returns (best result, force scale, omega scale, center)."""
    omega_scale = 2.0 * math.pi / problem.t_d
    center = float(np.mean(bounds))
    force_scale = max(
        (problem.best_force(w) for w in starts), default=0.0
    ) or 1e-24

    def unpack(p):
        return p[0] * force_scale, center + p[1] * omega_scale

    def fun(p):
        return problem.residual_and_jacobian(*unpack(p))[0]

    def jac(p):
        j = problem.residual_and_jacobian(*unpack(p))[1]
        return j * np.array([force_scale, omega_scale])

    lower = [0.0, (bounds[0] - center) / omega_scale]
    upper = [np.inf, (bounds[1] - center) / omega_scale]

    best = None
    fallback = None
    for omega_start in starts:
        p0 = [
            problem.best_force(omega_start) / force_scale,
            np.clip((omega_start - center) / omega_scale, lower[1], upper[1]),
        ]
        result = least_squares(
            fun, p0, jac=jac, bounds=(lower, upper), method="trf", max_nfev=max_nfev,
            x_scale=[1.0, 1.0],
        )
        force, omega_z = unpack(result.x)
        logger.debug(
            f"Start {omega_start / (2 * math.pi):.1f} Hz -> F={force:.4e} N, "
            f"f_z={omega_z / (2 * math.pi):.2f} Hz, cost={result.cost:.4e}, status={result.status}"
        )
        if result.status > 0:
            if best is None or result.cost < best.cost:
                best = result
        elif fallback is None or result.cost < fallback.cost:
            fallback = result

    if best is None:
        cost = None if fallback is None else float(fallback.cost)
        raise FitFailureError("Resonance fit did not converge from any start", cost)
    return best, force_scale, omega_scale, center


def _finish(problem, best, force_scale, omega_scale, center, n_starts, source) -> ForceFit:
    force = float(best.x[0] * force_scale)
    omega_z = float(center + best.x[1] * omega_scale)
    n_residuals = best.fun.size
    dof = max(n_residuals - 2, 1)
    reduced_chi2 = float(2.0 * best.cost / dof)
    scaled_cov = np.linalg.pinv(best.jac.T @ best.jac)
    transform = np.diag([force_scale, omega_scale])
    covariance = transform @ scaled_cov @ transform * reduced_chi2
    logger.info(
        f"Force fit ({source}): F={force:.4e} N, f_z={omega_z / (2 * math.pi):.2f} Hz, "
        f"chi2_red={reduced_chi2:.3g}"
    )
    return ForceFit(
        force=force,
        omega_z=omega_z,
        covariance=covariance,
        reduced_chi2=reduced_chi2,
        n_points=int(problem.omega_d.size),
        n_starts=int(n_starts),
        source=source,
        used_phase=problem.use_phase,
        cost=float(best.cost),
    )


def _starts(grid: np.ndarray, n_starts: int) -> tuple[np.ndarray, tuple[float, float]]:
    bounds = (float(np.min(grid)), float(np.max(grid)))
    return np.linspace(bounds[0], bounds[1], max(int(n_starts), 1)), bounds


def _fit_spectrum(
    spectrum: SpectrumResult,
    mode_guess: ModeParams,
    drive: DriveConfig,
    use_phase: bool,
    n_starts: int,
    max_nfev: int,
) -> ForceFit:
    grid = np.asarray(spectrum.freq_grid, dtype=float)
    lever = drive.t_d / 2.0 + spectrum.t_offset
    if use_phase:
        observed = np.asarray(spectrum.amplitude_t0) * np.exp(
            1j * np.asarray(spectrum.phase_trace_t0)
        )
    else:
        observed = math.sqrt(2.0) * np.asarray(spectrum.rms_velocity, dtype=complex)
    scale = float(np.max(np.abs(observed))) or 1.0
    problem = _PhasorProblem(
        omega_d=grid,
        observed=observed,
        sigma=np.full(grid.size, scale),
        phase_const=grid * lever,
        phase_slope=np.full(grid.size, -lever),
        mass=mode_guess.mass,
        weight=mode_guess.weight,
        t_d=drive.t_d,
        use_phase=use_phase,
    )
    starts, bounds = _starts(grid, n_starts)
    best, fs, ws, center = _solve(problem, starts, bounds, max_nfev)
    return _finish(problem, best, fs, ws, center, starts.size, "spectrum")


def _grid_problem(
    grid: ResidualGrid,
    mode_guess: ModeParams,
    drive: DriveConfig,
    det: DetectionConfig,
    basis_omega: float,
    use_phase: bool,
) -> _PhasorProblem:
    """Band-fit every valid row at basis_omega and convert to velocity phasors."""
    kappa = doppler_slope(det)
    if kappa == 0:
        raise InvalidParameterError("detection has no Doppler sensitivity", "k_detect")
    # Jittered start pulses average the band down by exp(-sigma^2 / 2)
    visibility = math.exp(-0.5 * det.beat_phase_jitter**2)

    rows = np.flatnonzero(grid.valid_rows)
    phasors, sigmas = [], []
    for row in rows:
        band = fit_band(
            grid.residuals[row],
            grid.fitted[row],
            grid.time_bins,
            basis_omega,
            t_ref=float(grid.detection_offsets[row]),
            decay_rate=det.damping_rate,
            bin_width=grid.bin_width,
        )
        phasors.append(band.phasor / (kappa * visibility))
        sigmas.append(band.phasor_sigma / abs(kappa * visibility))

    omega_d = np.asarray(grid.drive_frequencies)[rows]
    return _PhasorProblem(
        omega_d=omega_d,
        observed=np.array(phasors),
        sigma=np.maximum(np.array(sigmas), 1e-30),
        phase_const=omega_d * drive.t_d / 2.0 + drive.psi,
        phase_slope=np.asarray(grid.gate_origins)[rows] - drive.t_d / 2.0,
        mass=mode_guess.mass,
        weight=mode_guess.weight,
        t_d=drive.t_d,
        use_phase=use_phase,
    )


def _fit_grid(
    grid: ResidualGrid,
    mode_guess: ModeParams,
    drive: DriveConfig,
    det: DetectionConfig,
    use_phase: bool,
    n_starts: int,
    max_nfev: int,
    refinements: int = 1,
) -> ForceFit:
    use_phase = use_phase and det.beat_phase_jitter == 0
    valid = np.asarray(grid.drive_frequencies)[grid.valid_rows]
    starts, bounds = _starts(valid, n_starts)

    problem = _grid_problem(grid, mode_guess, drive, det, mode_guess.omega_z, use_phase)
    best, fs, ws, center = _solve(problem, starts, bounds, max_nfev)
    for _ in range(refinements):
        omega_z = float(center + best.x[1] * ws)
        problem = _grid_problem(grid, mode_guess, drive, det, omega_z, use_phase)
        best, fs, ws, center = _solve(problem, np.array([omega_z]), bounds, max_nfev)
    return _finish(problem, best, fs, ws, center, starts.size + refinements, "residual_grid")


def extract_force(
    data: ResidualGrid | SpectrumResult,
    mode_guess: ModeParams,
    drive: DriveConfig,
    det: DetectionConfig | None = None,
    *,
    use_phase: bool = True,
    n_starts: int | None = None,
    max_nfev: int | None = None,
) -> ForceFit:
    """Fit the drive force F and mode frequency omega_z to a resonance scan.

    ``mode_guess`` supplies the mass and coupling weight; its frequency seeds
    the band fits of a residual grid. ``det`` defaults to the detection
    settings recorded in the grid metadata.

    Raises:
        InvalidParameterError: fewer than ten usable frequency points
        FitFailureError: no start converged within the evaluation budget
    """
    n_starts = settings.fit.multi_start if n_starts is None else n_starts
    max_nfev = settings.fit.max_nfev if max_nfev is None else max_nfev

    if isinstance(data, SpectrumResult):
        if len(data) < MIN_POINTS:
            raise InvalidParameterError(f"need at least {MIN_POINTS} frequency points", "data")
        return _fit_spectrum(data, mode_guess, drive, use_phase, n_starts, max_nfev)

    if isinstance(data, ResidualGrid):
        if int(data.valid_rows.sum()) < MIN_POINTS:
            raise InvalidParameterError(f"need at least {MIN_POINTS} valid rows", "data")
        if det is None:
            det = DetectionConfig(**data.metadata["detection"])
        return _fit_grid(data, mode_guess, drive, det, use_phase, n_starts, max_nfev)

    raise InvalidParameterError(f"unsupported data type {type(data).__name__}", "data")
