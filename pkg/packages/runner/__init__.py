"""
Experiment runner.

Loads declarative scenario files, runs the requested products, writes them
with a checksummed manifest and verifies runs against declared expectations.
"""

from .config import (
    ExpectationSpec,
    Scenario,
    ScenarioFile,
    build_scenario,
    frequency_grid,
    list_scenarios,
    load_scenario,
    resolve_scenario_path,
)
from .errors import ExpectationError, OutputError, ScenarioError, UnknownProductError
from .models import CheckResult, FileEntry, ProductResult, RunManifest, VerificationReport
from .runner import check_manifest, read_manifest, run, run_async, run_directory
from .verify import verify, write_report

__all__ = [
    # Config
    "Scenario",
    "ScenarioFile",
    "ExpectationSpec",
    "load_scenario",
    "build_scenario",
    "list_scenarios",
    "resolve_scenario_path",
    "frequency_grid",
    # Models
    "RunManifest",
    "ProductResult",
    "FileEntry",
    "CheckResult",
    "VerificationReport",
    # Execution
    "run",
    "run_async",
    "run_directory",
    "read_manifest",
    "check_manifest",
    "verify",
    "write_report",
    # Errors
    "ScenarioError",
    "ExpectationError",
    "OutputError",
    "UnknownProductError",
]
