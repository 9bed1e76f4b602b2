"""Residual grid and arrival files.

Tabular data goes to ``<stem>.csv`` (header row of time-bin centers, first
column the drive frequency in Hz) or ``<stem>.json``; everything needed to
rebuild the grid goes to the ``<stem>.meta.json`` sidecar. Arrival tables list
every accepted start/stop event with its row and repetition index.
"""

import json
import math
from pathlib import Path
from typing import Any, Literal

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field, ValidationError

from packages.core.errors import OutputError, UnknownProductError

from .models import ResidualGrid

FLOAT_FORMAT = "%.17g"
FREQUENCY_COLUMN = "drive_frequency_hz"
SIDECAR_SUFFIX = ".meta.json"
SCHEMA_VERSION = 1

TableFormat = Literal["csv", "json"]


class GridSidecar(BaseModel):
    """Reproduction record written next to a residual grid."""

    product: Literal["residual_grid"] = "residual_grid"
    schema_version: int = SCHEMA_VERSION
    data_file: str
    drive_frequencies_hz: list[float]
    time_bins_s: list[float]
    fit_params: list[tuple[float, float] | None]
    row_errors: list[str | None]
    row_seeds: list[int]
    gate_origins_s: list[float]
    detection_offsets_s: list[float]
    reps: int
    seed: int
    residual_convention: str = "counts minus A exp(-t / tau) per row"
    metadata: dict[str, Any] = Field(default_factory=dict)


class GridTable(BaseModel):
    """JSON rendition of the residual matrix."""

    product: Literal["residual_grid"] = "residual_grid"
    drive_frequencies_hz: list[float]
    time_bins_s: list[float]
    residuals: list[list[float | None]]


def sidecar_path(data_path: Path) -> Path:
    return data_path.with_name(data_path.stem + SIDECAR_SUFFIX)


def _hz(grid: ResidualGrid) -> np.ndarray:
    return np.asarray(grid.drive_frequencies) / (2.0 * math.pi)


def grid_frame(grid: ResidualGrid) -> pd.DataFrame:
    """Residual matrix as a DataFrame, one row per drive frequency."""
    columns = [FLOAT_FORMAT % t for t in grid.time_bins]
    frame = pd.DataFrame(np.asarray(grid.residuals), columns=columns)
    frame.insert(0, FREQUENCY_COLUMN, _hz(grid))
    return frame


def write_grid(grid: ResidualGrid, directory: Path | str, stem: str = "residual_grid",
               table_format: TableFormat = "csv") -> list[Path]:
    """Write the residual table and its sidecar; returns both paths."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    data_path = directory / f"{stem}.{table_format}"

    try:
        if table_format == "csv":
            grid_frame(grid).to_csv(
                data_path, index=False, float_format=FLOAT_FORMAT, na_rep="nan",
                lineterminator="\n",
            )
        else:
            table = GridTable(
                drive_frequencies_hz=_hz(grid).tolist(),
                time_bins_s=np.asarray(grid.time_bins).tolist(),
                residuals=[
                    [None if not np.isfinite(x) else float(x) for x in row]
                    for row in np.asarray(grid.residuals)
                ],
            )
            data_path.write_text(table.model_dump_json(indent=2), encoding="utf-8")

        sidecar = GridSidecar(
            data_file=data_path.name,
            drive_frequencies_hz=_hz(grid).tolist(),
            time_bins_s=np.asarray(grid.time_bins).tolist(),
            fit_params=[tuple(p) if p is not None else None for p in grid.fit_params],
            row_errors=list(grid.row_errors),
            row_seeds=[int(s) for s in grid.row_seeds],
            gate_origins_s=np.asarray(grid.gate_origins).tolist(),
            detection_offsets_s=np.asarray(grid.detection_offsets).tolist(),
            reps=grid.reps,
            seed=grid.seed,
            metadata=grid.metadata,
        )
        meta_path = sidecar_path(data_path)
        meta_path.write_text(sidecar.model_dump_json(indent=2), encoding="utf-8")
    except (OSError, ValueError) as e:
        raise OutputError(f"Failed to write residual grid: {e}", str(data_path)) from e
    return [data_path, meta_path]


def read_grid(data_path: Path | str) -> ResidualGrid:
    """Rebuild a ResidualGrid from its table and sidecar.

    Counts are restored as residual plus the refitted background.
    """
    data_path = Path(data_path)
    meta_path = sidecar_path(data_path)
    try:
        sidecar = GridSidecar.model_validate_json(meta_path.read_text(encoding="utf-8"))
    except FileNotFoundError as e:
        raise OutputError(f"Missing sidecar {meta_path.name}", str(meta_path)) from e
    except ValidationError as e:
        raise UnknownProductError(f"Not a residual grid sidecar: {e}", str(meta_path)) from e

    try:
        if data_path.suffix == ".csv":
            frame = pd.read_csv(data_path, float_precision="round_trip")
            residuals = frame.drop(columns=[FREQUENCY_COLUMN]).to_numpy(dtype=float)
        else:
            table = GridTable.model_validate_json(data_path.read_text(encoding="utf-8"))
            residuals = np.array(
                [[np.nan if x is None else x for x in row] for row in table.residuals],
                dtype=float,
            )
    except (OSError, ValueError, KeyError) as e:
        raise OutputError(f"Failed to read residual grid: {e}", str(data_path)) from e

    t = np.asarray(sidecar.time_bins_s)
    fitted = np.vstack(
        [
            p[0] * np.exp(-t / p[1]) if p is not None else np.full_like(t, np.nan)
            for p in sidecar.fit_params
        ]
    )
    return ResidualGrid(
        drive_frequencies=np.asarray(sidecar.drive_frequencies_hz) * 2.0 * math.pi,
        time_bins=t,
        residuals=residuals,
        counts=residuals + fitted,
        fitted=fitted,
        fit_params=[tuple(p) if p is not None else None for p in sidecar.fit_params],
        row_errors=list(sidecar.row_errors),
        row_seeds=list(sidecar.row_seeds),
        gate_origins=np.asarray(sidecar.gate_origins_s),
        detection_offsets=np.asarray(sidecar.detection_offsets_s),
        reps=sidecar.reps,
        seed=sidecar.seed,
        metadata=sidecar.metadata,
    )


ARRIVAL_COLUMNS = ["row", "repetition_index", "arrival_time_s"]


class ArrivalSidecar(BaseModel):
    """Reproduction record written next to an arrival table."""

    product: Literal["arrivals"] = "arrivals"
    schema_version: int = SCHEMA_VERSION
    data_file: str
    drive_frequencies_hz: list[float]
    detection_offsets_s: list[float]
    row_seeds: list[int]
    reps: int
    seed: int
    metadata: dict[str, Any] = Field(default_factory=dict)


def arrivals_frame(grid: ResidualGrid) -> pd.DataFrame:
    """Accepted start/stop events of every row, in row then repetition order."""
    if not grid.arrivals:
        raise OutputError("Residual grid carries no arrival records")
    return pd.DataFrame.from_records(
        [
            {
                "row": row,
                "repetition_index": record.repetition_index,
                "arrival_time_s": record.arrival_time,
            }
            for row, arrivals in enumerate(grid.arrivals)
            for record in arrivals.records()
        ],
        columns=ARRIVAL_COLUMNS,
    )


def write_arrivals(grid: ResidualGrid, directory: Path | str, stem: str = "arrivals",
                   table_format: TableFormat = "csv") -> list[Path]:
    """Write the arrival table and its sidecar; returns both paths."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    data_path = directory / f"{stem}.{table_format}"
    frame = arrivals_frame(grid)

    try:
        if table_format == "csv":
            frame.to_csv(data_path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        else:
            data_path.write_text(
                json.dumps(frame.to_dict(orient="records"), indent=2), encoding="utf-8"
            )
        sidecar = ArrivalSidecar(
            data_file=data_path.name,
            drive_frequencies_hz=_hz(grid).tolist(),
            detection_offsets_s=np.asarray(grid.detection_offsets).tolist(),
            row_seeds=[int(s) for s in grid.row_seeds],
            reps=grid.reps,
            seed=grid.seed,
            metadata=grid.metadata,
        )
        meta_path = sidecar_path(data_path)
        meta_path.write_text(sidecar.model_dump_json(indent=2), encoding="utf-8")
    except (OSError, ValueError) as e:
        raise OutputError(f"Failed to write arrivals: {e}", str(data_path)) from e
    return [data_path, meta_path]


def read_arrivals(data_path: Path | str) -> tuple[ArrivalSidecar, pd.DataFrame]:
    """Sidecar and event table of an arrivals product."""
    data_path = Path(data_path)
    meta_path = sidecar_path(data_path)
    try:
        sidecar = ArrivalSidecar.model_validate_json(meta_path.read_text(encoding="utf-8"))
    except FileNotFoundError as e:
        raise OutputError(f"Missing sidecar {meta_path.name}", str(meta_path)) from e
    except ValidationError as e:
        raise UnknownProductError(f"Not an arrivals sidecar: {e}", str(meta_path)) from e
    try:
        if data_path.suffix == ".csv":
            frame = pd.read_csv(data_path, float_precision="round_trip")
        else:
            records = json.loads(data_path.read_text(encoding="utf-8"))
            frame = pd.DataFrame.from_records(records, columns=ARRIVAL_COLUMNS)
    except (OSError, ValueError) as e:
        raise OutputError(f"Failed to read arrivals: {e}", str(data_path)) from e
    return sidecar, frame
