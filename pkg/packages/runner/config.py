"""Scenario files.

Scenarios are YAML documents validated against a strict schema: unknown keys
are rejected and every error names its key path (``drive.t_d``). Non-SI
units are carried in the key suffix (``frequency_hz``, ``force_yn``,
``mass_amu``); ``load_scenario`` converts everything to SI and angular
frequencies once.
"""

import hashlib
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Literal

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from packages.config import settings
from packages.core.constants import AMU, BE9_MASS_AMU, YOCTONEWTON
from packages.core.errors import InvalidParameterError
from packages.core.models import DriveConfig, ModeParams
from packages.detection.models import DetectionConfig

from .errors import ScenarioError

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
SCENARIO_SUFFIXES = (".yaml", ".yml")

Product = Literal[
    "residual_grid",
    "arrivals",
    "rms_spectrum",
    "energy_spectrum",
    "phase_trace",
    "offset_scan",
    "force_fit",
    "resolvability",
]
CheckKind = Literal[
    "peak_location",
    "peak_count",
    "linewidth_ratio",
    "null_depth",
    "phase_slope",
    "zigzag",
    "trough_order",
    "offset_suppression",
    "offset_periodicity",
    "ks_pvalue",
    "zero_mean",
    "outlier_fraction",
    "band_period",
    "force_recovery",
]
Comparison = Literal["within", "at_most", "at_least", "equals"]
# Products without an image rendition
UNRENDERABLE = frozenset({"arrivals", "force_fit", "resolvability"})


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ModeSpec(StrictModel):
    """One motional mode (Hz, amu)."""

    frequency_hz: float = Field(gt=0)
    mass_amu: float = Field(default=BE9_MASS_AMU, gt=0)
    weight: float | None = Field(default=None, ge=0, le=1)


class DriveSpec(StrictModel):
    """Drive template; the sweep sets the frequency."""

    force_yn: float = Field(ge=0)
    t_d: float = Field(gt=0)
    psi: float = 0.0
    t_d_variants: list[float] = Field(default_factory=list)

    @model_validator(mode="after")
    def _positive_variants(self):
        if any(not v > 0 for v in self.t_d_variants):
            raise ValueError("t_d_variants must be positive")
        return self


class DetectionSpec(StrictModel):
    """Detection settings; omitted keys fall back to the environment defaults."""

    base_rate: float = Field(default_factory=lambda: settings.detection.base_rate, gt=0)
    detuning_hz: float = Field(default_factory=lambda: settings.detection.detuning_hz)
    linewidth_hz: float = Field(default_factory=lambda: settings.detection.linewidth_hz, gt=0)
    wavelength_nm: float = Field(default_factory=lambda: settings.detection.wavelength_nm, gt=0)
    beam_angle_deg: float = Field(default=0.0, ge=0, lt=90)
    damping_rate: float = Field(default_factory=lambda: settings.detection.damping_rate, ge=0)
    dead_time: float = Field(default_factory=lambda: settings.detection.dead_time, ge=0)
    window: float = Field(default_factory=lambda: settings.detection.window, gt=0)
    bin_width: float = Field(default_factory=lambda: settings.detection.bin_width, gt=0)
    lineshape: Literal["lorentzian", "linear"] = "lorentzian"
    beat_phase_jitter: float = Field(default=0.0, ge=0)


class SweepSpec(StrictModel):
    """Drive-frequency grid in Hz, inclusive of both ends."""

    start_hz: float = Field(gt=0)
    stop_hz: float = Field(gt=0)
    step_hz: float = Field(gt=0)
    spectrum_step_hz: float | None = Field(default=None, gt=0)

    @model_validator(mode="after")
    def _ordered(self):
        if self.start_hz >= self.stop_hz:
            raise ValueError("start_hz must be below stop_hz")
        return self


class ExpectationSpec(StrictModel):
    """One declarative check."""

    name: str = Field(min_length=1)
    kind: CheckKind
    product: str | None = None
    reference: str | None = None
    expected: float
    comparison: Comparison = "within"
    tolerance: float | None = Field(default=None, ge=0)
    rel_tolerance: float | None = Field(default=None, ge=0)
    column: str | None = None
    frequency_hz: float | None = Field(default=None, gt=0)
    min_height: float | None = Field(default=None, ge=0, le=1)


class ScenarioFile(StrictModel):
    """Top-level scenario document."""

    schema_version: Literal[1]
    name: str = Field(min_length=1)
    description: str = ""
    seed: int = Field(default=0, ge=0, lt=2**64)
    reps: int = Field(default=20_000, ge=1)
    modes: list[ModeSpec] = Field(min_length=1)
    drive: DriveSpec
    detection: DetectionSpec = Field(default_factory=DetectionSpec)
    sweep: SweepSpec
    t_offset: float = Field(default=0.0, ge=0)
    offsets: list[float] = Field(default_factory=list)
    rms_window: float | None = Field(default=None, gt=0)
    outputs: list[Product] = Field(min_length=1)
    rasters: list[Product] = Field(default_factory=list)
    expectations: list[ExpectationSpec] = Field(default_factory=list)

    @model_validator(mode="after")
    def _consistent(self):
        if any(o < 0 for o in self.offsets):
            raise ValueError("offsets must be non-negative")
        if "offset_scan" in self.outputs and not self.offsets:
            raise ValueError("offset_scan needs offsets")
        if "resolvability" in self.outputs and len(self.modes) != 2:
            raise ValueError("resolvability needs exactly two modes")
        missing = [p for p in self.rasters if p not in self.outputs]
        if missing:
            raise ValueError(f"rasters must be listed in outputs: {missing}")
        if any(p in UNRENDERABLE for p in self.rasters):
            raise ValueError(f"rasters cannot include {sorted(UNRENDERABLE)}")
        return self


def frequency_grid(start_hz: float, stop_hz: float, step_hz: float) -> np.ndarray:
    """Angular frequencies from start to stop (inclusive) in steps of step_hz."""
    n = int(math.floor((stop_hz - start_hz) / step_hz + 1e-9)) + 1
    return 2.0 * math.pi * (start_hz + step_hz * np.arange(n))


@dataclass
class Scenario:
    """A validated scenario in SI units and rad/s."""

    name: str
    description: str
    modes: list[ModeParams]
    drive: DriveConfig
    detection: DetectionConfig
    freq_grid: np.ndarray
    spectrum_grid: np.ndarray
    reps: int
    seed: int
    t_offset: float
    offsets: list[float]
    rms_window: float
    duration_variants: list[float]
    outputs: list[str]
    expectations: list[ExpectationSpec]
    rasters: list[str]
    source: ScenarioFile
    path: Path | None = None

    @property
    def scenario_hash(self) -> str:
        """sha256 of the canonical scenario document (seed included)."""
        canonical = self.source.model_dump_json()
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    def with_seed(self, seed: int) -> "Scenario":
        """Copy with a different seed; only Monte Carlo products change."""
        return build_scenario(self.source.model_copy(update={"seed": int(seed)}), self.path)


def _key_path(loc: tuple) -> str:
    return ".".join(str(part) for part in loc)


def build_scenario(document: ScenarioFile, path: Path | None = None) -> Scenario:
    """Convert a validated document to SI units."""
    default_weight = 1.0 / len(document.modes)
    try:
        modes = [
            ModeParams(
                omega_z=2.0 * math.pi * m.frequency_hz,
                mass=m.mass_amu * AMU,
                weight=default_weight if m.weight is None else m.weight,
            )
            for m in document.modes
        ]
        drive = DriveConfig(
            force=document.drive.force_yn * YOCTONEWTON,
            omega_d=modes[0].omega_z,
            t_d=document.drive.t_d,
            psi=document.drive.psi,
        )
        det = document.detection
        detection = DetectionConfig(
            base_rate=det.base_rate,
            detuning=2.0 * math.pi * det.detuning_hz,
            linewidth=2.0 * math.pi * det.linewidth_hz,
            k_detect=2.0 * math.pi / (det.wavelength_nm * 1e-9)
            * math.cos(math.radians(det.beam_angle_deg)),
            damping_rate=det.damping_rate,
            dead_time=det.dead_time,
            window=det.window,
            bin_width=det.bin_width,
            lineshape=det.lineshape,
            beat_phase_jitter=det.beat_phase_jitter,
        )
    except InvalidParameterError as e:
        section = "detection" if e.parameter in DetectionSpec.model_fields else "drive"
        key = f"{section}.{e.parameter}" if e.parameter else section
        raise ScenarioError(f"{key}: {e}", key, str(path) if path else None) from e

    sweep = document.sweep
    freq_grid = frequency_grid(sweep.start_hz, sweep.stop_hz, sweep.step_hz)
    spectrum_grid = frequency_grid(
        sweep.start_hz, sweep.stop_hz, sweep.spectrum_step_hz or sweep.step_hz
    )
    return Scenario(
        name=document.name,
        description=document.description,
        modes=modes,
        drive=drive,
        detection=detection,
        freq_grid=freq_grid,
        spectrum_grid=spectrum_grid,
        reps=document.reps,
        seed=document.seed,
        t_offset=document.t_offset,
        offsets=list(document.offsets),
        rms_window=document.rms_window or detection.window,
        duration_variants=list(document.drive.t_d_variants),
        outputs=list(dict.fromkeys(document.outputs)),
        expectations=list(document.expectations),
        rasters=list(dict.fromkeys(document.rasters)),
        source=document,
        path=path,
    )


def resolve_scenario_path(name_or_path: Path | str) -> Path:
    """Path of a scenario given a file path or a bundled scenario name."""
    candidate = Path(name_or_path)
    if candidate.exists():
        return candidate
    if candidate.suffix == "" and len(candidate.parts) == 1:
        for suffix in SCENARIO_SUFFIXES:
            bundled = settings.runner.scenario_dir / f"{candidate.name}{suffix}"
            if bundled.exists():
                return bundled
    raise FileNotFoundError(f"Scenario file not found: {name_or_path}")


def load_scenario(name_or_path: Path | str) -> Scenario:
    """Load, validate and convert a scenario file.

    Raises:
        FileNotFoundError: no such file or bundled scenario
        ScenarioError: invalid YAML or schema violation (key path attached)
    """
    path = resolve_scenario_path(name_or_path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f)
    except yaml.YAMLError as e:
        raise ScenarioError(f"Invalid YAML: {e}", None, str(path)) from e
    if not isinstance(data, dict):
        raise ScenarioError("Scenario must be a mapping", None, str(path))

    try:
        document = ScenarioFile(**data)
    except ValidationError as e:
        first = e.errors()[0]
        key = _key_path(first["loc"])
        raise ScenarioError(f"{key}: {first['msg']}", key, str(path)) from e

    scenario = build_scenario(document, path)
    logger.debug(f"Loaded scenario {scenario.name} from {path}")
    return scenario


def list_scenarios(directory: Path | str | None = None) -> list[Scenario]:
    """Bundled scenarios sorted by name; unreadable files are skipped with a warning."""
    directory = Path(directory) if directory else settings.runner.scenario_dir
    scenarios = []
    for path in sorted(p for p in directory.iterdir() if p.suffix in SCENARIO_SUFFIXES):
        try:
            scenarios.append(load_scenario(path))
        except ScenarioError as e:
            logger.warning(f"Skipping {path.name}: {e}")
    return sorted(scenarios, key=lambda s: s.name)
