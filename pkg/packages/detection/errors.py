"""Custom exceptions for the photon-detection module."""

from packages.core.errors import VelocimetryError


class FitFailureError(VelocimetryError):
    """Background or resonance fit could not be completed."""

    def __init__(self, message: str, best_residual: float | None = None):
        self.best_residual = best_residual
        super().__init__(message)
