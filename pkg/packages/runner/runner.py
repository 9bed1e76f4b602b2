"""Scenario execution.

Products run concurrently (at most ``jobs`` at a time); the Monte Carlo grid
is simulated once and shared by the products that need it. Data files are a
pure function of (scenario, seed); only the manifest carries timestamps.
"""

import asyncio
import hashlib
import logging
import time
from datetime import datetime, timezone
from pathlib import Path

from packages.config import settings
from packages.detection.output import TableFormat

from .config import Scenario
from .errors import OutputError
from .models import FileEntry, ProductResult, RunManifest
from .products import RunContext, build_product

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"


def sha256_file(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for block in iter(lambda: f.read(1 << 16), b""):
            digest.update(block)
    return digest.hexdigest()


def run_directory(scenario: Scenario, out_dir: Path | str | None = None) -> Path:
    base = Path(out_dir) if out_dir else settings.runner.output_dir
    return base / scenario.name


async def _run_product(
    ctx: RunContext, product: str, semaphore: asyncio.Semaphore
) -> tuple[ProductResult, list[Path]]:
    async with semaphore:
        started = time.perf_counter()
        try:
            paths = await build_product(ctx, product)
            result = ProductResult(
                name=product,
                success=True,
                files=[p.relative_to(ctx.out_dir).as_posix() for p in paths],
            )
        except Exception as e:
            logger.error(f"Product {product} failed: {e}")
            paths = []
            result = ProductResult(name=product, success=False, error=f"{type(e).__name__}: {e}")
        result.duration_seconds = round(time.perf_counter() - started, 3)
        logger.info(
            f"{product}: {'ok' if result.success else 'FAILED'} in {result.duration_seconds}s"
        )
        return result, paths


async def run_async(
    scenario: Scenario,
    out_dir: Path | str | None = None,
    *,
    jobs: int | None = None,
    table_format: TableFormat = "csv",
) -> RunManifest:
    """Run every requested product and write the manifest.

    Product failures are recorded in the manifest, not raised.
    """
    jobs = max(1, int(jobs or settings.runner.jobs))
    directory = run_directory(scenario, out_dir)
    try:
        directory.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise OutputError(f"Cannot create output directory: {e}", str(directory)) from e

    manifest = RunManifest(
        scenario=scenario.name,
        scenario_hash=scenario.scenario_hash,
        scenario_path=str(scenario.path) if scenario.path else None,
        seed=scenario.seed,
        jobs=jobs,
        table_format=table_format,
    )
    logger.info(
        f"Running {scenario.name} ({', '.join(scenario.outputs)}) "
        f"seed={scenario.seed} jobs={jobs}"
    )

    ctx = RunContext(scenario=scenario, out_dir=directory, jobs=jobs, table_format=table_format)
    semaphore = asyncio.Semaphore(jobs)
    outcomes = await asyncio.gather(
        *(_run_product(ctx, product, semaphore) for product in scenario.outputs)
    )

    entries = []
    for result, paths in outcomes:
        manifest.products.append(result)
        for path in paths:
            entries.append(
                FileEntry(
                    path=path.relative_to(directory).as_posix(),
                    sha256=sha256_file(path),
                    product=result.name,
                )
            )
    manifest.files = sorted(entries, key=lambda e: e.path)
    manifest.finished_at = datetime.now(timezone.utc)
    write_manifest(manifest, directory / MANIFEST_NAME)
    return manifest


def run(
    scenario: Scenario,
    out_dir: Path | str | None = None,
    *,
    jobs: int | None = None,
    table_format: TableFormat = "csv",
) -> RunManifest:
    """Synchronous wrapper around run_async."""
    return asyncio.run(run_async(scenario, out_dir, jobs=jobs, table_format=table_format))


def write_manifest(manifest: RunManifest, path: Path) -> Path:
    try:
        path.write_text(manifest.model_dump_json(indent=2), encoding="utf-8")
    except OSError as e:
        raise OutputError(f"Failed to write manifest: {e}", str(path)) from e
    return path


def read_manifest(path: Path | str) -> RunManifest:
    path = Path(path)
    if path.is_dir():
        path = path / MANIFEST_NAME
    try:
        return RunManifest.model_validate_json(path.read_text(encoding="utf-8"))
    except FileNotFoundError as e:
        raise OutputError(f"No manifest at {path}", str(path)) from e


def check_manifest(manifest: RunManifest, directory: Path | str) -> list[str]:
    """Re-hash every listed file; returns the paths whose checksum does not match."""
    directory = Path(directory)
    mismatched = []
    for entry in manifest.files:
        target = directory / entry.path
        if not target.exists() or sha256_file(target) != entry.sha256:
            mismatched.append(entry.path)
    return mismatched
