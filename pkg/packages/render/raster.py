"""Raster rendering of residual grids and spectra to portable pixmaps.

Residual grids become diverging heatmaps (blue below zero, white at zero,
red above) with a scale symmetric about zero; drive frequency runs up the
vertical axis and arrival time along the horizontal axis. Spectra become
line plots. Output is binary PPM written by Pillow, so identical inputs give
identical bytes.
"""

import json
import logging
from pathlib import Path

import numpy as np
from PIL import Image, ImageDraw

from packages.config import settings
from packages.core.errors import OutputError, UnknownProductError
from packages.detection.models import ResidualGrid
from packages.detection.output import SIDECAR_SUFFIX, read_grid
from packages.spectroscopy.output import OFFSET_COLUMN, PRIMARY_COLUMN, read_spectrum_table

logger = logging.getLogger(__name__)

NEGATIVE = np.array([33, 102, 172], dtype=float)
POSITIVE = np.array([178, 24, 43], dtype=float)
WHITE = np.array([255, 255, 255], dtype=float)
MISSING = (128, 128, 128)

BACKGROUND = (255, 255, 255)
AXIS = (0, 0, 0)
TRACE_COLORS = [(33, 102, 172), (178, 24, 43), (27, 120, 55), (118, 42, 131), (230, 97, 1)]
MARGIN = 24


def diverging_colors(values: np.ndarray, scale: float) -> np.ndarray:
    """RGB uint8 array for signed values; |value| = scale maps to full color."""
    values = np.asarray(values, dtype=float)
    finite = np.isfinite(values)
    if scale > 0:
        level = np.clip(np.where(finite, values, 0.0) / scale, -1.0, 1.0)
    else:
        level = np.zeros_like(values)
    weight = np.abs(level)[..., None]
    target = np.where((level < 0)[..., None], NEGATIVE, POSITIVE)
    rgb = np.rint(WHITE + (target - WHITE) * weight).astype(np.uint8)
    rgb[~finite] = MISSING
    return rgb


def render_heatmap(grid: ResidualGrid, cell_px: int | None = None) -> Image.Image:
    """Heatmap of the residuals, highest drive frequency on top."""
    cell_px = cell_px or settings.render.cell_px
    residuals = np.asarray(grid.residuals, dtype=float)
    finite = residuals[np.isfinite(residuals)]
    scale = float(np.max(np.abs(finite))) if finite.size else 0.0
    order = np.argsort(np.asarray(grid.drive_frequencies))[::-1]
    rgb = diverging_colors(residuals[order], scale)
    image = Image.fromarray(np.ascontiguousarray(rgb))
    if cell_px > 1:
        image = image.resize(
            (image.width * cell_px, image.height * cell_px), resample=Image.Resampling.NEAREST
        )
    return image


def render_lines(
    x: np.ndarray,
    traces: list[np.ndarray],
    width: int | None = None,
    height: int | None = None,
) -> Image.Image:
    """Line plot of one or more traces sharing an x axis."""
    width = width or settings.render.width
    height = height or settings.render.height
    image = Image.new("RGB", (width, height), BACKGROUND)
    draw = ImageDraw.Draw(image)
    left, top, right, bottom = MARGIN, MARGIN, width - MARGIN, height - MARGIN
    draw.rectangle([left, top, right, bottom], outline=AXIS)

    x = np.asarray(x, dtype=float)
    stacked = np.concatenate([np.asarray(t, dtype=float) for t in traces])
    stacked = stacked[np.isfinite(stacked)]
    if x.size < 2 or stacked.size == 0:
        return image
    y_min, y_max = float(stacked.min()), float(stacked.max())
    if y_max == y_min:
        y_min, y_max = y_min - 1.0, y_max + 1.0
    x_min, x_max = float(x.min()), float(x.max())

    def to_pixels(trace):
        px = left + (x - x_min) / (x_max - x_min) * (right - left)
        py = bottom - (np.asarray(trace, dtype=float) - y_min) / (y_max - y_min) * (bottom - top)
        return [(float(a), float(b)) for a, b in zip(px, py) if np.isfinite(b)]

    if y_min < 0 < y_max:
        zero = bottom - (0.0 - y_min) / (y_max - y_min) * (bottom - top)
        draw.line([(left, zero), (right, zero)], fill=(200, 200, 200))
    for i, trace in enumerate(traces):
        points = to_pixels(trace)
        if len(points) > 1:
            draw.line(points, fill=TRACE_COLORS[i % len(TRACE_COLORS)], width=1)
    return image


def _product_of(data_path: Path) -> str:
    meta_path = data_path.with_name(data_path.stem + SIDECAR_SUFFIX)
    if not meta_path.exists():
        raise UnknownProductError(f"No sidecar for {data_path.name}", str(data_path))
    try:
        product = json.loads(meta_path.read_text(encoding="utf-8")).get("product")
    except ValueError as e:
        raise UnknownProductError(f"Unreadable sidecar: {e}", str(meta_path)) from e
    if product not in ("residual_grid", *PRIMARY_COLUMN):
        raise UnknownProductError(f"Cannot render product {product!r}", str(data_path))
    return product


def render_file(
    data_path: Path | str,
    out_path: Path | str | None = None,
    *,
    cell_px: int | None = None,
    width: int | None = None,
    height: int | None = None,
) -> Path:
    """Render a product data file to ``<stem>.ppm`` (or ``out_path``).

    Raises:
        UnknownProductError: the file is not a residual grid or spectrum
        OutputError: the image cannot be written
    """
    data_path = Path(data_path)
    product = _product_of(data_path)
    if product == "residual_grid":
        image = render_heatmap(read_grid(data_path), cell_px)
    else:
        sidecar, frame = read_spectrum_table(data_path)
        column = PRIMARY_COLUMN[product]
        if product == "offset_scan":
            groups = [
                frame[np.isclose(frame[OFFSET_COLUMN], o, rtol=1e-12, atol=0.0)]
                for o in sidecar.offsets_s
            ]
        else:
            groups = [frame]
        x = groups[0]["drive_frequency_hz"].to_numpy()
        image = render_lines(x, [g[column].to_numpy() for g in groups], width, height)

    out_path = Path(out_path) if out_path else data_path.with_suffix(".ppm")
    try:
        out_path.parent.mkdir(parents=True, exist_ok=True)
        image.save(out_path, format="PPM")
    except OSError as e:
        raise OutputError(f"Failed to write image: {e}", str(out_path)) from e
    logger.info(f"Rendered {product} to {out_path}")
    return out_path
