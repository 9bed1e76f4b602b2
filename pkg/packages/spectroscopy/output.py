"""Spectrum, resolvability and force-fit files.

Spectra are tables with one row per grid frequency (``<stem>.csv`` or
``<stem>.json``) plus a ``<stem>.meta.json`` sidecar carrying the product
name and the convention strings. Offset scans stack one spectrum per offset
with a leading ``t_offset_s`` column.
"""

import json
import math
from pathlib import Path
from typing import Any, Literal

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field, ValidationError

from packages.core.errors import OutputError, UnknownProductError
from packages.detection.output import FLOAT_FORMAT, SIDECAR_SUFFIX, TableFormat

from .models import ForceFit, ResolvabilityReport, SpectrumResult

SpectrumProduct = Literal["rms_spectrum", "energy_spectrum", "phase_trace", "offset_scan"]

# Column plotted for each product
PRIMARY_COLUMN = {
    "rms_spectrum": "rms_velocity",
    "energy_spectrum": "absorbed_energy",
    "phase_trace": "phase_trace_t0",
    "offset_scan": "rms_velocity",
}
COLUMNS = [
    "drive_frequency_hz",
    "rms_velocity",
    "absorbed_energy",
    "phase_trace_t0",
    "amplitude_t0",
]
OFFSET_COLUMN = "t_offset_s"


class SpectrumSidecar(BaseModel):
    """Metadata written next to a spectrum table."""

    product: SpectrumProduct
    schema_version: int = 1
    data_file: str
    offsets_s: list[float]
    window_s: float
    t_d_s: float
    units: dict[str, str] = Field(
        default_factory=lambda: {
            "drive_frequency_hz": "Hz",
            "rms_velocity": "m/s",
            "absorbed_energy": "J",
            "phase_trace_t0": "rad",
            "amplitude_t0": "m/s",
        }
    )
    metadata: dict[str, Any] = Field(default_factory=dict)


class ReportDocument(BaseModel):
    """Resolvability report file."""

    product: Literal["resolvability"] = "resolvability"
    report: dict[str, Any]
    metadata: dict[str, Any] = Field(default_factory=dict)


class ForceFitDocument(BaseModel):
    """Force-fit result file."""

    product: Literal["force_fit"] = "force_fit"
    fit: dict[str, Any]
    truth: dict[str, float] = Field(default_factory=dict)


def spectrum_frame(spectrum: SpectrumResult) -> pd.DataFrame:
    return pd.DataFrame(
        {
            "drive_frequency_hz": np.asarray(spectrum.freq_grid) / (2.0 * math.pi),
            "rms_velocity": spectrum.rms_velocity,
            "absorbed_energy": spectrum.absorbed_energy,
            "phase_trace_t0": spectrum.phase_trace_t0,
            "amplitude_t0": spectrum.amplitude_t0,
        },
        columns=COLUMNS,
    )


def _write_table(frame: pd.DataFrame, path: Path, table_format: TableFormat) -> None:
    if table_format == "csv":
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    else:
        # float repr round-trips; energies are ~1e-27 J
        path.write_text(json.dumps(frame.to_dict(orient="records"), indent=2), encoding="utf-8")


def write_spectra(
    spectra: list[SpectrumResult],
    directory: Path | str,
    product: SpectrumProduct,
    stem: str | None = None,
    table_format: TableFormat = "csv",
) -> list[Path]:
    """Write one spectrum (or an offset scan) with its sidecar; returns both paths."""
    if not spectra:
        raise OutputError("No spectra to write")
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    data_path = directory / f"{stem or product}.{table_format}"

    frames = []
    for spectrum in spectra:
        frame = spectrum_frame(spectrum)
        if product == "offset_scan":
            frame.insert(0, OFFSET_COLUMN, spectrum.t_offset)
        frames.append(frame)
    sidecar = SpectrumSidecar(
        product=product,
        data_file=data_path.name,
        offsets_s=[s.t_offset for s in spectra],
        window_s=spectra[0].window,
        t_d_s=spectra[0].t_d,
        metadata=spectra[0].metadata,
    )
    meta_path = data_path.with_name(data_path.stem + SIDECAR_SUFFIX)
    try:
        _write_table(pd.concat(frames, ignore_index=True), data_path, table_format)
        meta_path.write_text(sidecar.model_dump_json(indent=2), encoding="utf-8")
    except (OSError, ValueError) as e:
        raise OutputError(f"Failed to write {product}: {e}", str(data_path)) from e
    return [data_path, meta_path]


def read_spectrum_table(data_path: Path | str) -> tuple[SpectrumSidecar, pd.DataFrame]:
    """Sidecar and raw table of a spectrum product."""
    data_path = Path(data_path)
    meta_path = data_path.with_name(data_path.stem + SIDECAR_SUFFIX)
    try:
        sidecar = SpectrumSidecar.model_validate_json(meta_path.read_text(encoding="utf-8"))
    except FileNotFoundError as e:
        raise OutputError(f"Missing sidecar {meta_path.name}", str(meta_path)) from e
    except ValidationError as e:
        raise UnknownProductError(f"Not a spectrum sidecar: {e}", str(meta_path)) from e
    try:
        if data_path.suffix == ".csv":
            frame = pd.read_csv(data_path, float_precision="round_trip")
        else:
            frame = pd.DataFrame.from_records(json.loads(data_path.read_text(encoding="utf-8")))
    except (OSError, ValueError) as e:
        raise OutputError(f"Failed to read {sidecar.product}: {e}", str(data_path)) from e
    return sidecar, frame


def read_spectra(data_path: Path | str) -> list[SpectrumResult]:
    """Rebuild the SpectrumResult list of a spectrum product."""
    sidecar, frame = read_spectrum_table(data_path)
    if sidecar.product == "offset_scan":
        groups = [
            frame[np.isclose(frame[OFFSET_COLUMN], o, rtol=1e-12, atol=0.0)]
            for o in sidecar.offsets_s
        ]
    else:
        groups = [frame]
    return [
        SpectrumResult(
            freq_grid=group["drive_frequency_hz"].to_numpy() * 2.0 * math.pi,
            rms_velocity=group["rms_velocity"].to_numpy(),
            absorbed_energy=group["absorbed_energy"].to_numpy(),
            phase_trace_t0=group["phase_trace_t0"].to_numpy(),
            amplitude_t0=group["amplitude_t0"].to_numpy(),
            t_offset=offset,
            window=sidecar.window_s,
            t_d=sidecar.t_d_s,
            metadata=sidecar.metadata,
        )
        for group, offset in zip(groups, sidecar.offsets_s)
    ]


def write_report(
    report: ResolvabilityReport, path: Path | str, metadata: dict[str, Any] | None = None
) -> Path:
    path = Path(path)
    document = ReportDocument(report=report.as_dict(), metadata=metadata or {})
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(document.model_dump_json(indent=2), encoding="utf-8")
    except OSError as e:
        raise OutputError(f"Failed to write report: {e}", str(path)) from e
    return path


def write_force_fit(fit: ForceFit, path: Path | str, truth: dict[str, float] | None = None) -> Path:
    path = Path(path)
    document = ForceFitDocument(fit=fit.as_dict(), truth=truth or {})
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(document.model_dump_json(indent=2), encoding="utf-8")
    except OSError as e:
        raise OutputError(f"Failed to write force fit: {e}", str(path)) from e
    return path
