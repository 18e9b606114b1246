#!/usr/bin/env python3
"""Main entry point for the chaoslab CLI.

    chaoslab <experiment> --config <path> --out <dir> --seed <u64> [--self-check]
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Any

from rich.console import Console
from rich.table import Table

from .config import get_runtime_config
from .exceptions import ChaosLabError, ConfigError, ParameterRegionError, SelfCheckError
from .execution.error_handler import ErrorStrategy
from .execution.events import EventEmitter, EventType
from .explab import run_experiment
from .explab.config import U64_MAX, ExperimentName, load_experiment_config
from .explab.output import RunManifest
from .logging_config import configure_logging, use_debug_logging, use_minimal_logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_REGION = 3
EXIT_SELF_CHECK = 4


def parse_seed(text: str) -> int:
    """argparse type for an unsigned 64-bit seed."""
    try:
        value = int(text, 0)
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}") from e
    if not 0 <= value <= U64_MAX:
        raise argparse.ArgumentTypeError(f"seed must lie in [0, 2^64 - 1], got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chaoslab",
        description="Run a Wiener-chaos experiment and write results.csv and manifest.json.",
    )
    parser.add_argument(
        "experiment", choices=[name.value for name in ExperimentName], help="Experiment to run"
    )
    parser.add_argument(
        "--config", type=Path, default=None, help="key = value configuration file"
    )
    parser.add_argument("--out", type=Path, default=None, help="Output directory of the run")
    parser.add_argument(
        "--seed", type=parse_seed, default=None, help="Root seed (overrides the config file)"
    )
    parser.add_argument(
        "--self-check",
        action="store_true",
        help="Compare every exact column with its brute-force oracle before running",
    )
    parser.add_argument("--workers", type=int, default=None, help="Replica worker threads")
    parser.add_argument(
        "--error-strategy",
        choices=[strategy.value for strategy in ErrorStrategy],
        default=None,
        help="What to do when a point fails",
    )
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-q", "--quiet", action="store_true", help="Only warnings and errors")
    verbosity.add_argument("-v", "--verbose", action="store_true", help="Debug logging")
    return parser


def _format_prediction(prediction: dict[str, Any] | None) -> str:
    if not prediction:
        return "-"
    # envelope exponents bound the slope from above
    prefix = ">= " if prediction.get("envelope") else ""
    return f"{prefix}{prediction['exponent']:.4f}"


class RunDisplay:
    """Renders runner events and the final summary with rich."""

    def __init__(self, console: Console | None = None, quiet: bool = False):
        self.console = console or Console()
        self.quiet = quiet
        self._points = 0

    def subscribe(self, emitter: EventEmitter) -> None:
        for event in EventType:
            emitter.on(event.value, self.display_event)

    def display_event(self, event: str, data: dict[str, Any]) -> None:
        """Display an event in the console."""
        if event == EventType.POINT_ERROR.value or event == EventType.POINT_RETRY.value:
            color = "red" if event == EventType.POINT_ERROR.value else "yellow"
            self.console.print(
                f"[bold {color}]✗ {data.get('point', '?')}:[/bold {color}] {data.get('error', '')}"
            )
            return
        if self.quiet:
            return
        if event == EventType.EXPERIMENT_STARTED.value:
            self._points = data.get("points", 0)
            self.console.print(
                f"\n[bold green]▶ {data.get('experiment')}[/bold green] "
                f"[dim]{self._points} points, seed {data.get('seed')}[/dim]"
            )
        elif event == EventType.SELFCHECK_COMPLETED.value:
            passed, total = data.get("passed", 0), data.get("total", 0)
            color = "green" if passed == total else "red"
            self.console.print(f"[{color}]Self-check {passed}/{total} oracles[/{color}]")
        elif event == EventType.POINT_COMPLETED.value:
            self.console.print(
                f"[green]✓[/green] [{data.get('index', 0) + 1}/{self._points}] {data.get('point')}"
            )
        elif event == EventType.EXPERIMENT_COMPLETED.value:
            failures = data.get("failures", 0)
            status = "[green]completed[/green]" if not failures else f"[yellow]{failures} failed points[/yellow]"
            self.console.print(f"[bold]■ {data.get('experiment')}[/bold] {status}")

    def display_summary(self, manifest: RunManifest, out: Path) -> None:
        """Table of fitted slopes against predictions, then the verdicts."""
        table = Table(title=f"{manifest.experiment} rate fits")
        table.add_column("quantity")
        table.add_column("slope", justify="right")
        table.add_column("stderr", justify="right")
        table.add_column("predicted", justify="right")
        table.add_column("agrees", justify="center")
        for key, fit in manifest.fits.items():
            prediction = manifest.predictions.get(key)
            verdict = manifest.summary.get(key)
            table.add_row(
                key,
                f"{fit['slope']:.4f}" if fit else "-",
                f"{fit['stderr']:.4f}" if fit else "-",
                _format_prediction(prediction),
                {True: "[green]yes[/green]", False: "[red]no[/red]"}.get(verdict, "-"),
            )
        self.console.print(table)
        for key, value in manifest.summary.items():
            if key not in manifest.fits:
                self.console.print(f"  • {key}: {value}")
        self.console.print(f"[dim]Wrote {out}[/dim]")


def main(argv: list[str] | None = None) -> int:
    """Main CLI entry point."""
    args = build_parser().parse_args(argv)
    display = RunDisplay(quiet=args.quiet)
    try:
        runtime = get_runtime_config()
    except ConfigError as e:
        display.console.print(f"[bold red]Configuration error:[/bold red] {e}")
        return EXIT_CONFIG

    if args.quiet:
        use_minimal_logging()
    elif args.verbose:
        use_debug_logging()
    else:
        configure_logging(level=runtime.log_level)

    out = args.out or Path(runtime.output_dir) / args.experiment
    emitter = EventEmitter()
    display.subscribe(emitter)

    try:
        config = load_experiment_config(
            args.experiment,
            args.config,
            out,
            seed=args.seed,
            self_check=args.self_check,
            workers=args.workers or runtime.workers,
        )
        if args.error_strategy:
            config = config.model_copy(
                update={"error_strategy": ErrorStrategy(args.error_strategy)}
            )
        manifest = run_experiment(config, emitter)
    except ConfigError as e:
        display.console.print(f"[bold red]Configuration error:[/bold red] {e}")
        return EXIT_CONFIG
    except ParameterRegionError as e:
        display.console.print(f"[bold red]Parameters outside the validity region:[/bold red] {e}")
        return EXIT_REGION
    except SelfCheckError as e:
        display.console.print(f"[bold red]Self-check failed:[/bold red] {e}")
        return EXIT_SELF_CHECK
    except ChaosLabError as e:
        logger.error(f"Run failed: {e}")
        display.console.print(f"[bold red]Error:[/bold red] {e}")
        return EXIT_FAILURE

    if not args.quiet:
        display.display_summary(manifest, out)
    return EXIT_FAILURE if manifest.failures else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
