"""Product builders.

Each builder computes one requested product for a scenario, writes it under
the run directory and returns the written paths.
"""

import asyncio
import logging
from dataclasses import dataclass
from pathlib import Path

from packages.detection.models import ResidualGrid
from packages.detection.output import SIDECAR_SUFFIX, TableFormat, write_arrivals, write_grid
from packages.detection.sweep import run_sweep_async
from packages.render import render_file
from packages.spectroscopy.fitting import extract_force
from packages.spectroscopy.output import write_force_fit, write_report, write_spectra
from packages.spectroscopy.resolvability import resolvability
from packages.spectroscopy.spectra import offset_scan, rms_spectrum

from .config import Scenario

logger = logging.getLogger(__name__)

SPECTRUM_PRODUCTS = ("rms_spectrum", "energy_spectrum", "phase_trace")


@dataclass
class RunContext:
    """Shared state of one run."""

    scenario: Scenario
    out_dir: Path
    jobs: int = 1
    table_format: TableFormat = "csv"
    grid: ResidualGrid | None = None
    _grid_lock: asyncio.Lock | None = None

    async def residual_grid(self) -> ResidualGrid:
        """Monte Carlo grid, simulated once per run."""
        if self._grid_lock is None:
            self._grid_lock = asyncio.Lock()
        async with self._grid_lock:
            if self.grid is None:
                s = self.scenario
                self.grid = await run_sweep_async(
                    s.modes,
                    s.drive,
                    s.detection,
                    s.freq_grid,
                    s.reps,
                    s.seed,
                    t_offset=s.t_offset,
                    jobs=self.jobs,
                )
        return self.grid


def variant_stem(product: str, index: int) -> str:
    """File stem of the index-th drive-duration variant (1-based)."""
    return f"{product}_td{index}"


def build_spectrum(ctx: RunContext, product: str) -> list[Path]:
    """Noise-free spectrum at the template duration and each duration variant."""
    s = ctx.scenario
    paths = []
    durations = [s.drive.t_d, *s.duration_variants]
    for index, t_d in enumerate(durations):
        drive = s.drive.with_duration(t_d)
        spectrum = rms_spectrum(s.modes, drive, s.spectrum_grid, s.rms_window, s.t_offset)
        stem = product if index == 0 else variant_stem(product, index)
        paths += write_spectra([spectrum], ctx.out_dir, product, stem, ctx.table_format)
    return paths


def build_offset_scan(ctx: RunContext, product: str = "offset_scan") -> list[Path]:
    s = ctx.scenario
    spectra = offset_scan(s.modes, s.drive, s.offsets, s.spectrum_grid, s.rms_window)
    return write_spectra(spectra, ctx.out_dir, product, product, ctx.table_format)


def build_resolvability(ctx: RunContext, product: str = "resolvability") -> list[Path]:
    s = ctx.scenario
    report = resolvability(s.modes, s.drive, s.spectrum_grid, s.rms_window)
    path = write_report(report, ctx.out_dir / f"{product}.json", {"scenario": s.name})
    return [path]


async def build_residual_grid(ctx: RunContext, product: str = "residual_grid") -> list[Path]:
    grid = await ctx.residual_grid()
    return await asyncio.to_thread(write_grid, grid, ctx.out_dir, product, ctx.table_format)


async def build_arrivals(ctx: RunContext, product: str = "arrivals") -> list[Path]:
    grid = await ctx.residual_grid()
    return await asyncio.to_thread(write_arrivals, grid, ctx.out_dir, product, ctx.table_format)


async def build_force_fit(ctx: RunContext, product: str = "force_fit") -> list[Path]:
    s = ctx.scenario
    grid = await ctx.residual_grid()
    fit = await asyncio.to_thread(extract_force, grid, s.modes[0], s.drive, s.detection)
    truth = {"force": s.drive.force, "omega_z": s.modes[0].omega_z}
    return [write_force_fit(fit, ctx.out_dir / f"{product}.json", truth)]


async def _build_data(ctx: RunContext, product: str) -> list[Path]:
    if product == "residual_grid":
        return await build_residual_grid(ctx)
    if product == "arrivals":
        return await build_arrivals(ctx)
    if product == "force_fit":
        return await build_force_fit(ctx)
    if product in SPECTRUM_PRODUCTS:
        return await asyncio.to_thread(build_spectrum, ctx, product)
    if product == "offset_scan":
        return await asyncio.to_thread(build_offset_scan, ctx)
    if product == "resolvability":
        return await asyncio.to_thread(build_resolvability, ctx)
    raise ValueError(f"Unknown product: {product}")


def render_rasters(paths: list[Path]) -> list[Path]:
    """PPM image of every data table in ``paths`` (sidecars skipped)."""
    return [
        render_file(p)
        for p in paths
        if p.suffix in (".csv", ".json") and not p.name.endswith(SIDECAR_SUFFIX)
    ]


async def build_product(ctx: RunContext, product: str) -> list[Path]:
    """Dispatch one product, then render it when the scenario asks for a raster.

    Synchronous builders run in a worker thread.
    """
    paths = await _build_data(ctx, product)
    if product in ctx.scenario.rasters:
        paths += await asyncio.to_thread(render_rasters, paths)
    return paths
