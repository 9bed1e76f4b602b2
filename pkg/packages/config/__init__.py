"""Centralized configuration management for doppler-velocimetry.

This module provides type-safe configuration with environment variable support
and sensible defaults. Scenario files describe individual experiments; the
settings here hold the ambient defaults (output locations, parallelism,
detection defaults, fit and render knobs).

Usage:
    from packages.config import settings

    out_dir = settings.runner.output_dir
    rate = settings.detection.base_rate
    starts = settings.fit.multi_start

Environment Variables:
    See .env.example for full documentation of available settings.
"""

# Load .env BEFORE any settings are read (must be first)
from dotenv import load_dotenv

load_dotenv()

import logging  # noqa: E402
import os  # noqa: E402
from dataclasses import dataclass, field  # noqa: E402
from functools import lru_cache  # noqa: E402
from pathlib import Path  # noqa: E402
from typing import Optional  # noqa: E402

# Project root is 2 levels up from packages/config/__init__.py
PROJECT_ROOT = Path(__file__).parent.parent.parent.resolve()

logger = logging.getLogger(__name__)


def _get_clean_env(key: str, default: Optional[str] = None) -> Optional[str]:
    """Get environment variable with validation and comment stripping.

    Handles common .env file issues:
    - Strips whitespace
    - Treats comment-only values as None
    - Rejects values with inline '#' comments

    Args:
        key: Environment variable name
        default: Default value if not found or invalid

    Returns:
        Cleaned value or default
    """
    value = os.getenv(key)

    if not value:
        return default

    value = value.strip()

    if not value or value.startswith("#"):
        return default

    if "#" in value:
        logger.warning(
            f"Environment variable {key} contains '#' - likely malformed comment. "
            f"Using default value. Check your .env file."
        )
        return default

    return value


def _env_float(key: str, default: float) -> float:
    return float(_get_clean_env(key, str(default)))


def _env_int(key: str, default: int) -> int:
    return int(_get_clean_env(key, str(default)))


@dataclass(frozen=True)
class RunnerConfig:
    """Scenario runner configuration.

    Environment Variables:
        VELO_OUTPUT_DIR: Directory receiving run outputs (default: <root>/data/runs)
        VELO_SCENARIO_DIR: Directory of bundled scenarios (default: <root>/config/scenarios)
        VELO_JOBS: Parallel sweep rows / products (default: 1)
        VELO_LOG_LEVEL: Logging level for the CLI (default: INFO)
    """

    output_dir: Path = field(
        default_factory=lambda: Path(
            _get_clean_env("VELO_OUTPUT_DIR", str(PROJECT_ROOT / "data" / "runs"))
        )
    )
    scenario_dir: Path = field(
        default_factory=lambda: Path(
            _get_clean_env("VELO_SCENARIO_DIR", str(PROJECT_ROOT / "config" / "scenarios"))
        )
    )
    jobs: int = field(default_factory=lambda: _env_int("VELO_JOBS", 1))
    log_level: str = field(default_factory=lambda: _get_clean_env("VELO_LOG_LEVEL", "INFO"))


@dataclass(frozen=True)
class DetectionDefaults:
    """Default Doppler detection parameters (config units).

    Used when a scenario omits a detection key. Values are desk-scale choices,
    not measured count rates.

    Environment Variables:
        VELO_BASE_RATE: Detected scatter rate at line center, 1/s (default: 2e5)
        VELO_DETUNING_HZ: Detection laser detuning, Hz (default: -12e6)
        VELO_LINEWIDTH_HZ: Atomic FWHM linewidth, Hz (default: 19.4e6)
        VELO_WAVELENGTH_NM: Detection wavelength, nm (default: 313)
        VELO_DAMPING_RATE: Velocity-amplitude decay during detection, 1/s (default: 0)
        VELO_DEAD_TIME: Hardware dead time, s (default: 4.5e-6)
        VELO_WINDOW: Detection window, s (default: 40e-6)
        VELO_BIN_WIDTH: Histogram bin width, s (default: 100e-9)
    """

    base_rate: float = field(default_factory=lambda: _env_float("VELO_BASE_RATE", 2.0e5))
    detuning_hz: float = field(default_factory=lambda: _env_float("VELO_DETUNING_HZ", -12.0e6))
    linewidth_hz: float = field(default_factory=lambda: _env_float("VELO_LINEWIDTH_HZ", 19.4e6))
    wavelength_nm: float = field(default_factory=lambda: _env_float("VELO_WAVELENGTH_NM", 313.0))
    damping_rate: float = field(default_factory=lambda: _env_float("VELO_DAMPING_RATE", 0.0))
    dead_time: float = field(default_factory=lambda: _env_float("VELO_DEAD_TIME", 4.5e-6))
    window: float = field(default_factory=lambda: _env_float("VELO_WINDOW", 40.0e-6))
    bin_width: float = field(default_factory=lambda: _env_float("VELO_BIN_WIDTH", 100.0e-9))


@dataclass(frozen=True)
class FitConfig:
    """Resonance fitting and spectral analysis configuration.

    Environment Variables:
        VELO_FIT_MULTI_START: Starting points for omega_z across the scan window (default: 25)
        VELO_FIT_MAX_NFEV: Function evaluation budget per start (default: 200)
        VELO_PEAK_PROMINENCE: Minimum peak prominence, fraction of global max (default: 0.01)
        VELO_PEAK_MIN_HEIGHT: Resonance height floor, fraction of global max (default: 0.5)
        VELO_ZIGZAG_THRESHOLD: Ignored phase slopes, fraction of t_d/2 (default: 0.05)
    """

    multi_start: int = field(default_factory=lambda: _env_int("VELO_FIT_MULTI_START", 25))
    max_nfev: int = field(default_factory=lambda: _env_int("VELO_FIT_MAX_NFEV", 200))
    peak_prominence: float = field(
        default_factory=lambda: _env_float("VELO_PEAK_PROMINENCE", 0.01)
    )
    peak_min_height: float = field(
        default_factory=lambda: _env_float("VELO_PEAK_MIN_HEIGHT", 0.5)
    )
    zigzag_threshold: float = field(
        default_factory=lambda: _env_float("VELO_ZIGZAG_THRESHOLD", 0.05)
    )


@dataclass(frozen=True)
class RenderConfig:
    """Raster rendering configuration.

    Environment Variables:
        VELO_RENDER_CELL_PX: Pixel size of one heatmap cell (default: 2)
        VELO_RENDER_WIDTH: Line plot canvas width (default: 640)
        VELO_RENDER_HEIGHT: Line plot canvas height (default: 360)
    """

    cell_px: int = field(default_factory=lambda: _env_int("VELO_RENDER_CELL_PX", 2))
    width: int = field(default_factory=lambda: _env_int("VELO_RENDER_WIDTH", 640))
    height: int = field(default_factory=lambda: _env_int("VELO_RENDER_HEIGHT", 360))


@dataclass(frozen=True)
class Settings:
    """Main application settings aggregating all domain configs.

    Usage:
        from packages.config import settings

        jobs = settings.runner.jobs
        dead_time = settings.detection.dead_time
    """

    runner: RunnerConfig = field(default_factory=RunnerConfig)
    detection: DetectionDefaults = field(default_factory=DetectionDefaults)
    fit: FitConfig = field(default_factory=FitConfig)
    render: RenderConfig = field(default_factory=RenderConfig)


@lru_cache()
def get_settings() -> Settings:
    """Get cached settings singleton.

    Settings are loaded once and cached for the lifetime of the process.
    To reload settings, clear the cache: get_settings.cache_clear()
    """
    return Settings()


# Convenience export - import as: from packages.config import settings
settings = get_settings()

__all__ = [
    "Settings",
    "RunnerConfig",
    "DetectionDefaults",
    "FitConfig",
    "RenderConfig",
    "get_settings",
    "settings",
    "PROJECT_ROOT",
]
