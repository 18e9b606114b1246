"""Experiment orchestration: points, error strategies, self-checks and output."""

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field, replace
from typing import Any, ClassVar

import numpy as np

from ..distance.wasserstein import (
    EmpiricalSample,
    SlicedSettings,
    independence_gap_estimate,
    self_distance_estimate,
)
from ..exceptions import ParameterRegionError
from ..execution.error_handler import ErrorHandler, PointFailure
from ..execution.events import EventEmitter, EventType
from ..execution.pool import ReplicaPool
from .config import ExperimentConfig, ExperimentParams
from .oracles import OracleCheck, require_all
from .output import OutputManager, Row, RunManifest
from .rates import Prediction, RateFit, fit_or_none

logger = logging.getLogger(__name__)

# stream ids below this bound belong to one point; points are spaced by it
STREAMS_PER_POINT = 64


@dataclass(frozen=True)
class Point:
    """One entry of an experiment's schedule."""

    index: int
    values: dict[str, Any]

    @property
    def label(self) -> str:
        return ", ".join(f"{k}={v}" for k, v in self.values.items())


@dataclass(frozen=True)
class RunContext:
    """Run-wide resources handed to every point evaluation."""

    seed: int
    pool: ReplicaPool
    sliced: SlicedSettings
    refinement: int = 0

    def stream(self, point: Point, component: int = 0) -> int:
        """Replica stream of one random component of a point."""
        if not 0 <= component < STREAMS_PER_POINT:
            raise ParameterRegionError(f"Stream component {component} out of range")
        return point.index * STREAMS_PER_POINT + component

    def derived_seed(self, point: Point, component: int = 0) -> int:
        """Seed for permutations and projections, independent across points."""
        sequence = np.random.SeedSequence(self.seed, spawn_key=(self.stream(point, component),))
        return int(sequence.generate_state(1, dtype=np.uint64)[0])

    def refined(self, refinement: int) -> "RunContext":
        return replace(self, refinement=refinement)


@dataclass(frozen=True)
class MonteCarloSummary:
    """Mean and standard error of replicated values."""

    mean: float
    stderr: float

    @classmethod
    def of(cls, values: np.ndarray) -> "MonteCarloSummary":
        values = np.asarray(values, dtype=float).ravel()
        return cls(float(np.mean(values)), float(np.std(values, ddof=1) / math.sqrt(values.size)))


def dependence_columns(
    ctx: RunContext, point: Point, joint: np.ndarray, split: int = 1, component: int = 0
) -> dict[str, float]:
    """gap, baseline and their standard errors for an n x d joint sample."""
    sample = EmpiricalSample(joint)
    seed = ctx.derived_seed(point, component)
    gap, gap_se = independence_gap_estimate(sample, split, ctx.sliced, seed)
    baseline, baseline_se = self_distance_estimate(sample, ctx.sliced, seed)
    return {
        "gap": gap,
        "gap_stderr": gap_se,
        "baseline": baseline,
        "baseline_stderr": baseline_se,
    }


@dataclass
class Summary:
    """Fits, predictions and verdicts of a finished run."""

    fits: dict[str, Any] = field(default_factory=dict)
    predictions: dict[str, Any] = field(default_factory=dict)
    checks: dict[str, Any] = field(default_factory=dict)

    def add_rate(
        self,
        key: str,
        fit: RateFit | None,
        prediction: Prediction | None = None,
        tolerance: float | None = None,
        envelope: bool = False,
    ) -> None:
        """Record a fit, its prediction and whether they agree.

        With ``envelope`` (or an envelope prediction) the fitted slope only
        has to stay below the predicted exponent. The prediction entry
        carries the fitted slope so the manifest shows both side by side.
        """
        self.fits[key] = fit.to_dict() if fit else None
        if prediction is None:
            return
        envelope = envelope or prediction.envelope
        self.predictions[key] = {
            **prediction.to_dict(),
            "envelope": envelope,
            "fitted_slope": fit.slope if fit else None,
        }
        if fit is None or tolerance is None:
            self.checks[key] = None
        elif envelope:
            self.checks[key] = fit.below(prediction.exponent, tolerance)
        else:
            self.checks[key] = fit.agrees_with(prediction.exponent, tolerance)


def rows_where(rows: list[Row], **match: Any) -> list[Row]:
    return [row for row in rows if all(row.get(k) == v for k, v in match.items())]


def fit_column(rows: list[Row], column: str, x: str = "N", absolute: bool = False) -> RateFit | None:
    """Rate fit of ``column`` against ``x`` over the rows holding a finite value."""
    table = []
    for row in rows:
        value = row.get(column)
        if value is None or not math.isfinite(value):
            continue
        table.append((row[x], abs(value) if absolute else value))
    return fit_or_none(table)


class Experiment(ABC):
    """Base class for all experiments."""

    params_model: ClassVar[type[ExperimentParams]]

    def __init__(self, params: ExperimentParams):
        """Initialize the experiment.

        Args:
            params: Validated parameters of this experiment
        """
        if not isinstance(params, self.params_model):
            raise ParameterRegionError(
                f"{self.name} expects {self.params_model.__name__}, got {type(params).__name__}"
            )
        self.params = params
        self.last_sample: np.ndarray | None = None

    @property
    def name(self) -> str:
        return self.__class__.__name__

    @property
    @abstractmethod
    def columns(self) -> list[str]:
        """Fixed column order of results.csv, ending with ``error``."""

    @abstractmethod
    def points(self) -> list[Point]:
        pass

    @abstractmethod
    def evaluate(self, point: Point, ctx: RunContext) -> list[Row]:
        """Rows of one point; ``ctx.refinement`` grows on every retry."""

    @abstractmethod
    def summarize(self, rows: list[Row]) -> Summary:
        pass

    def validate(self) -> list[str]:
        """Validate the parameters against the experiment's region.

        Returns:
            List of validation error messages (empty if valid)
        """
        return []

    def self_check(self, ctx: RunContext) -> list[OracleCheck]:
        return []

    def failed_rows(self, point: Point, error: Exception) -> list[Row]:
        row: Row = {name: math.nan for name in self.columns}
        row.update(point.values)
        row["error"] = f"{type(error).__name__}: {error}"
        return [row]


class ExperimentRunner:
    """Runs one experiment end to end and writes its output directory."""

    def __init__(
        self,
        config: ExperimentConfig,
        experiment: Experiment,
        event_emitter: EventEmitter | None = None,
    ):
        """Initialize the runner.

        Args:
            config: Run configuration
            experiment: Experiment built from ``config.params``
            event_emitter: Optional emitter receiving progress events
        """
        self.config = config
        self.experiment = experiment
        self.event_emitter = event_emitter or EventEmitter()
        self.error_handler = ErrorHandler(
            error_strategy=config.error_strategy,
            max_retries=config.max_retries,
            event_emitter=self.event_emitter,
        )
        self.context = RunContext(
            seed=config.seed,
            pool=ReplicaPool(max_workers=config.workers, chunk_size=config.chunk_size),
            sliced=SlicedSettings(projections=config.params.projections),
        )

    def _emit(self, event: EventType, data: dict[str, Any]) -> None:
        self.event_emitter.emit(event.value, data)

    def run_self_check(self) -> list[OracleCheck]:
        """Compare every exact column with its oracle; raises SelfCheckError on mismatch."""
        checks = self.experiment.self_check(self.context)
        passed = sum(check.passed for check in checks)
        self._emit(
            EventType.SELFCHECK_COMPLETED,
            {"experiment": self.experiment.name, "passed": passed, "total": len(checks)},
        )
        require_all(checks)
        logger.info(f"Self-check passed: {passed}/{len(checks)} oracle comparisons")
        return checks

    def run(self) -> RunManifest:
        """Execute the experiment and save its outputs.

        Returns:
            The manifest that was written to ``manifest.json``

        Raises:
            ParameterRegionError: If the parameters leave the validity region
            SelfCheckError: If a self-check oracle disagrees
        """
        experiment = self.experiment
        errors = experiment.validate()
        if errors:
            raise ParameterRegionError("; ".join(errors))

        points = experiment.points()
        self._emit(
            EventType.EXPERIMENT_STARTED,
            {"experiment": experiment.name, "points": len(points), "seed": self.config.seed},
        )
        logger.info(f"Running {experiment.name} over {len(points)} points")

        checks = self.run_self_check() if self.config.self_check else None

        rows: list[Row] = []
        failures: list[dict[str, str]] = []
        for point in points:
            self._emit(EventType.POINT_STARTED, {"point": point.label, "index": point.index})
            result = self.error_handler.execute(
                point.label,
                lambda refinement, p=point: experiment.evaluate(p, self.context.refined(refinement)),
            )
            if isinstance(result, PointFailure):
                rows.extend(experiment.failed_rows(point, result.error))
                failures.append({"point": result.point, "error": str(result.error)})
            else:
                rows.extend(result)
            self._emit(EventType.POINT_COMPLETED, {"point": point.label, "index": point.index})

        summary = experiment.summarize(rows)
        manifest = RunManifest(
            experiment=self.config.experiment.value,
            seed=self.config.seed,
            config=self.config.echo(),
            columns=experiment.columns,
            rows=rows,
            fits=summary.fits,
            predictions=summary.predictions,
            summary=summary.checks,
            self_check=[check.to_dict() for check in checks] if checks is not None else None,
            failures=failures,
        )
        samples = experiment.last_sample if self.config.write_samples else None
        OutputManager(self.config.output_dir).save_run(manifest, samples)
        self._emit(
            EventType.EXPERIMENT_COMPLETED,
            {"experiment": experiment.name, "rows": len(rows), "failures": len(failures)},
        )
        return manifest
