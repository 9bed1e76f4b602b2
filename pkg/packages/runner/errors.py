"""Custom exceptions for the experiment runner."""

from packages.core.errors import OutputError, UnknownProductError, VelocimetryError


class ScenarioError(VelocimetryError):
    """Scenario file failed validation."""

    def __init__(self, message: str, key_path: str | None = None, path: str | None = None):
        self.key_path = key_path
        self.path = path
        super().__init__(message)


class ExpectationError(ScenarioError):
    """Scenario cannot be verified (no or inconsistent expectations)."""


__all__ = [
    "ScenarioError",
    "ExpectationError",
    "OutputError",
    "UnknownProductError",
]
