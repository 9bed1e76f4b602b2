"""Data models for run manifests and verification reports."""

from datetime import datetime, timezone
from typing import Literal

from pydantic import BaseModel, Field

from packages.__version__ import __version__


def _utcnow() -> datetime:
    return datetime.now(timezone.utc)


class FileEntry(BaseModel):
    """One emitted file, relative to the run directory."""

    path: str
    sha256: str
    product: str


class ProductResult(BaseModel):
    """Outcome of one requested product."""

    name: str
    success: bool
    files: list[str] = Field(default_factory=list)
    error: str | None = None
    duration_seconds: float | None = None


class RunManifest(BaseModel):
    """Record of a run: inputs, outputs and their checksums."""

    scenario: str
    scenario_hash: str
    scenario_path: str | None = None
    tool_version: str = __version__
    seed: int
    jobs: int = 1
    table_format: Literal["csv", "json"] = "csv"
    started_at: datetime = Field(default_factory=_utcnow)
    finished_at: datetime | None = None
    products: list[ProductResult] = Field(default_factory=list)
    files: list[FileEntry] = Field(default_factory=list)

    @property
    def success(self) -> bool:
        return all(p.success for p in self.products)

    @property
    def failed_products(self) -> list[str]:
        return [p.name for p in self.products if not p.success]

    def product_files(self, product: str) -> list[str]:
        return [f.path for f in self.files if f.product == product]


class CheckResult(BaseModel):
    """Outcome of one declarative check."""

    name: str
    kind: str
    product: str | None = None
    status: Literal["pass", "fail", "error"]
    measured: float | None = None
    expected: float
    comparison: str
    tolerance: float | None = None
    rel_tolerance: float | None = None
    message: str = ""

    @property
    def passed(self) -> bool:
        return self.status == "pass"


class VerificationReport(BaseModel):
    """Machine-readable verification outcome."""

    scenario: str
    scenario_hash: str
    manifest_ok: bool
    checks: list[CheckResult] = Field(default_factory=list)
    created_at: datetime = Field(default_factory=_utcnow)

    @property
    def passed(self) -> bool:
        return self.manifest_ok and all(c.passed for c in self.checks)

    @property
    def counts(self) -> dict[str, int]:
        summary = {"pass": 0, "fail": 0, "error": 0}
        for check in self.checks:
            summary[check.status] += 1
        return summary
