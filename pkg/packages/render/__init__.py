"""
Raster rendering.

Heatmaps of residual grids and line plots of spectra, written as PPM images.
"""

from .raster import diverging_colors, render_file, render_heatmap, render_lines

__all__ = [
    "diverging_colors",
    "render_heatmap",
    "render_lines",
    "render_file",
]
