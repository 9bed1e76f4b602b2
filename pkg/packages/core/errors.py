"""Custom exceptions and warnings shared by the velocimetry packages."""


class VelocimetryError(Exception):
    """Base exception for all velocimetry errors."""


class InvalidParameterError(VelocimetryError, ValueError):
    """Non-finite or out-of-range physical parameter."""

    def __init__(self, message: str, parameter: str | None = None):
        self.parameter = parameter
        super().__init__(message)


class StepSizeError(InvalidParameterError):
    """Integration step too coarse to resolve the oscillation."""

    def __init__(self, dt: float, max_dt: float):
        self.dt = dt
        self.max_dt = max_dt
        super().__init__(f"Step size {dt:.3e} s exceeds limit {max_dt:.3e} s", "dt")


class ModelValidityWarning(UserWarning):
    """Drive detuning outside the near-resonant regime of the closed-form model."""


class OutputError(VelocimetryError):
    """Error writing or reading product files."""

    def __init__(self, message: str, path: str | None = None):
        self.path = path
        super().__init__(message)


class UnknownProductError(OutputError):
    """File does not hold a recognised product."""
