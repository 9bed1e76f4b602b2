#!/usr/bin/env python3
"""
Command line interface for doppler-velocimetry.

Examples:
    velocimetry list-scenarios
    velocimetry run fig3_resonance --jobs 4
    velocimetry run fig4_delta_1 --seed 7 --out /tmp/runs --format json
    velocimetry verify fig3_resonance --only linewidth
    velocimetry render data/runs/fig3_resonance/residual_grid.csv
"""

import argparse
import logging
import sys
from pathlib import Path

from packages.__version__ import __version__
from packages.config import settings
from packages.core.errors import OutputError, UnknownProductError, VelocimetryError
from packages.render import render_file
from packages.runner import (
    ExpectationError,
    ScenarioError,
    list_scenarios,
    load_scenario,
    read_manifest,
    run,
    run_directory,
    verify,
    write_report,
)

logger = logging.getLogger(__name__)

VERIFICATION_NAME = "verification.json"


# ANSI color codes for better formatting
class Colors:
    GREEN = "\033[92m"
    YELLOW = "\033[93m"
    RED = "\033[91m"
    CYAN = "\033[96m"
    BOLD = "\033[1m"
    END = "\033[0m"


def _error(message: str) -> None:
    print(f"{Colors.RED}✗ {message}{Colors.END}", file=sys.stderr)


def _load(name_or_path: str, seed: int | None):
    """Load a scenario, applying a seed override. Returns None after printing the error."""
    try:
        scenario = load_scenario(name_or_path)
    except FileNotFoundError as e:
        _error(str(e))
        return None
    except ScenarioError as e:
        _error(f"Invalid scenario: {e}")
        return None
    if seed is not None:
        scenario = scenario.with_seed(seed)
    return scenario


def cmd_run(args: argparse.Namespace) -> int:
    """Run a scenario; exit 0 iff every product succeeded."""
    scenario = _load(args.scenario, args.seed)
    if scenario is None:
        return 1
    try:
        manifest = run(scenario, args.out, jobs=args.jobs, table_format=args.format)
    except VelocimetryError as e:
        _error(f"Run failed: {e}")
        return 1

    manifest_path = run_directory(scenario, args.out) / "manifest.json"
    print(manifest_path)
    if not manifest.success:
        _error(f"Failed products: {', '.join(manifest.failed_products)}")
        return 1
    print(f"{Colors.GREEN}✓ {len(manifest.files)} files written{Colors.END}")
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    """Run (or reuse) a scenario and evaluate its expectations."""
    scenario = _load(args.scenario, args.seed)
    if scenario is None:
        return 1
    if not scenario.expectations:
        _error(f"Scenario {scenario.name} has no expectations block; nothing to verify")
        return 1

    directory = run_directory(scenario, args.out)
    manifest = None
    if args.reuse:
        try:
            manifest = read_manifest(directory)
            if manifest.scenario_hash != scenario.scenario_hash:
                logger.info("Existing run was made from a different scenario; re-running")
                manifest = None
        except OutputError:
            manifest = None
    if manifest is None:
        try:
            manifest = run(scenario, args.out, jobs=args.jobs, table_format=args.format)
        except VelocimetryError as e:
            _error(f"Run failed: {e}")
            return 1

    try:
        report = verify(scenario, args.out, only=args.only, manifest=manifest)
    except ExpectationError as e:
        _error(str(e))
        return 1

    print(f"\n{Colors.BOLD}{scenario.name}{Colors.END}")
    if not report.manifest_ok:
        _error("manifest checksums do not match the emitted files")
    for check in report.checks:
        color = {"pass": Colors.GREEN, "fail": Colors.RED, "error": Colors.YELLOW}[check.status]
        measured = "n/a" if check.measured is None else f"{check.measured:.6g}"
        tolerance = ""
        if check.tolerance is not None:
            tolerance += f" ±{check.tolerance:g}"
        if check.rel_tolerance is not None:
            tolerance += f" ±{check.rel_tolerance:.1%}"
        print(
            f"  {color}{check.status.upper():5}{Colors.END} {check.name}: "
            f"measured {measured}, expected {check.comparison} {check.expected:g}{tolerance}"
            + (f" ({check.message})" if check.message else "")
        )
    write_report(report, directory / VERIFICATION_NAME)
    counts = report.counts
    print(f"\n{counts['pass']} passed, {counts['fail']} failed, {counts['error']} errored")
    return 0 if report.passed else 1


def cmd_render(args: argparse.Namespace) -> int:
    """Render a residual grid or spectrum file to a PPM image."""
    try:
        path = render_file(
            args.file, args.output, cell_px=args.cell_px, width=args.width, height=args.height
        )
    except UnknownProductError as e:
        _error(f"Unknown product: {e}")
        return 1
    except (OutputError, FileNotFoundError) as e:
        _error(str(e))
        return 1
    print(path)
    return 0


def cmd_list(args: argparse.Namespace) -> int:
    """List bundled scenarios with their products."""
    scenarios = list_scenarios(args.scenario_dir)
    if not scenarios:
        print(f"No scenarios in {args.scenario_dir or settings.runner.scenario_dir}")
        return 0
    for scenario in scenarios:
        print(f"{Colors.CYAN}{scenario.name}{Colors.END}")
        if scenario.description:
            print(f"  {scenario.description}")
        print(f"  outputs: {', '.join(scenario.outputs)}")
        if scenario.expectations:
            print(f"  checks: {', '.join(e.name for e in scenario.expectations)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="velocimetry",
        description="Phase-coherent Doppler velocimetry simulation and analysis",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=__doc__,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--verbose", "-v", action="store_true", help="Enable debug logging")
    subparsers = parser.add_subparsers(dest="command", required=True)

    def add_run_options(sub: argparse.ArgumentParser) -> None:
        sub.add_argument("scenario", help="Scenario file or bundled scenario name")
        sub.add_argument("--seed", type=int, default=None, help="Override the scenario seed")
        sub.add_argument("--out", type=Path, default=None, help="Output directory")
        sub.add_argument(
            "--jobs", type=int, default=None, help="Parallel rows/products (default: VELO_JOBS)"
        )
        sub.add_argument(
            "--format", choices=["csv", "json"], default="csv", help="Tabular product format"
        )

    run_parser = subparsers.add_parser("run", help="Run a scenario")
    add_run_options(run_parser)
    run_parser.set_defaults(handler=cmd_run)

    verify_parser = subparsers.add_parser("verify", help="Run a scenario and check expectations")
    add_run_options(verify_parser)
    verify_parser.add_argument("--only", default=None, help="Run a single named check")
    verify_parser.add_argument(
        "--reuse", action="store_true", help="Reuse an existing run of the same scenario"
    )
    verify_parser.set_defaults(handler=cmd_verify)

    render_parser = subparsers.add_parser("render", help="Render a grid or spectrum file")
    render_parser.add_argument("file", type=Path, help="Product data file (.csv or .json)")
    render_parser.add_argument("--output", "-o", type=Path, default=None, help="Image path")
    render_parser.add_argument("--cell-px", type=int, default=None, help="Heatmap cell size")
    render_parser.add_argument("--width", type=int, default=None, help="Line plot width")
    render_parser.add_argument("--height", type=int, default=None, help="Line plot height")
    render_parser.set_defaults(handler=cmd_render)

    list_parser = subparsers.add_parser("list-scenarios", help="List bundled scenarios")
    list_parser.add_argument("--scenario-dir", type=Path, default=None, help="Scenario directory")
    list_parser.set_defaults(handler=cmd_list)
    return parser


def main(argv: list[str] | None = None) -> int:
    """Main entry point."""
    parser = build_parser()
    args = parser.parse_args(argv)

    level = logging.DEBUG if args.verbose else getattr(
        logging, settings.runner.log_level.upper(), logging.INFO
    )
    logging.basicConfig(level=level, format="%(asctime)s - %(name)s - %(levelname)s - %(message)s")

    if getattr(args, "jobs", None) is not None and args.jobs < 1:
        parser.error("--jobs must be at least 1")

    try:
        return args.handler(args)
    except KeyboardInterrupt:
        _error("Interrupted")
        return 130


if __name__ == "__main__":
    sys.exit(main())
