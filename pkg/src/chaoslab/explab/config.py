"""Experiment configuration: the key = value file format and its models.

A configuration file holds one ``key = value`` pair per line; ``#`` starts
a comment. Lists are comma separated and N schedules may be written as
``2^7..2^13`` (every power of two in between). Unknown keys are errors.
"""

import logging
import re
from enum import Enum
from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from ..exceptions import ConfigError
from ..execution.error_handler import ErrorStrategy

logger = logging.getLogger(__name__)

U64_MAX = 2**64 - 1

_POWER_RANGE = re.compile(r"^\s*2\^(\d+)\s*\.\.\s*2\^(\d+)\s*$")
_POWER = re.compile(r"^\s*2\^(\d+)\s*$")


class ExperimentName(str, Enum):
    JOINT_CLT = "joint-clt"
    INFINITE_CHAOS = "infinite-chaos"
    CENTRAL_NONCENTRAL = "central-noncentral"
    COUNTEREXAMPLE = "counterexample"
    SDE = "sde"
    HURST = "hurst"


def parse_key_values(text: str) -> dict[str, str]:
    """Parse ``key = value`` lines into a dict.

    Raises:
        ConfigError: On a line without ``=``, an empty key or a repeated key
    """
    entries: dict[str, str] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"Line {number}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"Line {number}: empty key")
        if key in entries:
            raise ConfigError(f"Line {number}: duplicate key {key!r}")
        entries[key] = value
    return entries


def _parse_int_token(token: str) -> int:
    match = _POWER.match(token)
    if match:
        return 2 ** int(match.group(1))
    return int(token)


def parse_schedule(value: str | list[int] | tuple[int, ...]) -> list[int]:
    """N schedule from ``2^a..2^b``, a comma list (``2^k`` allowed) or a list."""
    if isinstance(value, (list, tuple)):
        return [int(v) for v in value]
    match = _POWER_RANGE.match(value)
    if match:
        low, high = int(match.group(1)), int(match.group(2))
        if low > high:
            raise ValueError(f"Empty schedule {value!r}")
        return [2**k for k in range(low, high + 1)]
    return [_parse_int_token(token) for token in value.split(",") if token.strip()]


def _split_list(value: Any) -> Any:
    if isinstance(value, str):
        return [token.strip() for token in value.split(",") if token.strip()]
    return value


def _check_schedule(schedule: list[int]) -> list[int]:
    if not schedule:
        raise ValueError("Schedule must not be empty")
    if any(n < 1 for n in schedule):
        raise ValueError(f"Schedule entries must be positive, got {schedule}")
    if any(b <= a for a, b in zip(schedule, schedule[1:])):
        raise ValueError(f"Schedule must be strictly increasing, got {schedule}")
    return schedule


class ExperimentParams(BaseModel):
    """Settings shared by every experiment."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    replicas: int = Field(default=2000, ge=4)
    projections: int = Field(default=128, ge=1)
    slope_tolerance: float = Field(default=0.15, gt=0.0)

    @field_validator("replicas")
    @classmethod
    def even_replicas(cls, value: int) -> int:
        if value % 2:
            raise ValueError("replicas must be even so that samples split in halves")
        return value


class ScheduleParams(ExperimentParams):
    """Experiments over an increasing schedule of N."""

    schedule: list[int]

    @field_validator("schedule", mode="before")
    @classmethod
    def parse_schedule_text(cls, value: Any) -> list[int]:
        return parse_schedule(value)

    @field_validator("schedule")
    @classmethod
    def schedule_increasing(cls, value: list[int]) -> list[int]:
        return _check_schedule(value)


class ScheduledParams(ScheduleParams):
    """An N schedule for exact moments and a shorter one for Monte-Carlo runs."""

    mc_schedule: list[int]

    @field_validator("mc_schedule", mode="before")
    @classmethod
    def parse_mc_schedule_text(cls, value: Any) -> list[int]:
        return parse_schedule(value)

    @field_validator("mc_schedule")
    @classmethod
    def mc_schedule_increasing(cls, value: list[int]) -> list[int]:
        return _check_schedule(value)


class JointCLTParams(ScheduledParams):
    p: int = Field(default=2, ge=1)
    q: list[int] = Field(default_factory=lambda: [2])
    H0: float = 0.3
    H: list[float] = Field(default_factory=lambda: [0.9])
    schedule: list[int] = Field(default_factory=lambda: [2**k for k in range(7, 14)])
    mc_schedule: list[int] = Field(default_factory=lambda: [2**k for k in range(7, 11)])
    grid_subdivisions: int = Field(default=64, ge=2)
    tail_mass: float = Field(default=1e-4, gt=0.0)

    @field_validator("q", "H", mode="before")
    @classmethod
    def split_lists(cls, value: Any) -> Any:
        return _split_list(value)

    @model_validator(mode="after")
    def matching_components(self) -> "JointCLTParams":
        if len(self.q) != len(self.H):
            raise ValueError(f"{len(self.q)} orders q for {len(self.H)} Hurst indices H")
        return self


class InfiniteChaosParams(ScheduledParams):
    p: int = Field(default=2, ge=1)
    H: list[float] = Field(default_factory=lambda: [0.3, 0.7])
    schedule: list[int] = Field(default_factory=lambda: [2**k for k in range(7, 14)])
    mc_schedule: list[int] = Field(default_factory=lambda: [2**k for k in range(7, 11)])
    expansion_order: int = Field(default=12, ge=1)

    @field_validator("H", mode="before")
    @classmethod
    def split_lists(cls, value: Any) -> Any:
        return _split_list(value)


class CentralNoncentralParams(ScheduledParams):
    q: int = Field(default=3, ge=3)
    H: float = 0.78
    schedule: list[int] = Field(default_factory=lambda: [2**k for k in range(8, 14)])
    mc_schedule: list[int] = Field(default_factory=lambda: [2**k for k in range(8, 11)])
    proxy_factor: int = Field(default=64, ge=1)
    mc_proxy_factor: int = Field(default=8, ge=1)


class CounterexampleParams(ScheduledParams):
    p: int = Field(default=2, ge=2)
    H: float = 0.3
    schedule: list[int] = Field(default_factory=lambda: [2**k for k in range(6, 13)])
    mc_schedule: list[int] = Field(default_factory=lambda: [2**k for k in range(6, 11)])


class SDEParams(ExperimentParams):
    drift: Literal["tanh", "linear"] = "tanh"
    lambdas: list[float] = Field(default_factory=lambda: [-8.0, -4.0, -2.0, -1.0, 0.0, 0.5, 1.0])
    t: float = Field(default=1.0, gt=0.0)
    x0: float = 0.0
    steps: int = Field(default=256, ge=1)
    bound_constant: float = Field(default=1.0, gt=0.0)
    strong_tolerance: float = Field(default=0.05, gt=0.0)

    @field_validator("lambdas", mode="before")
    @classmethod
    def split_lists(cls, value: Any) -> Any:
        return _split_list(value)


class HurstParams(ScheduleParams):
    H: list[float] = Field(default_factory=lambda: [0.3, 0.5, 0.75, 0.9])
    schedule: list[int] = Field(default_factory=lambda: [2**k for k in range(6, 11)])
    replicas: int = Field(default=10000, ge=4)
    correlated: bool = False

    @field_validator("H", mode="before")
    @classmethod
    def split_lists(cls, value: Any) -> Any:
        return _split_list(value)


PARAMS_MODELS: dict[ExperimentName, type[ExperimentParams]] = {
    ExperimentName.JOINT_CLT: JointCLTParams,
    ExperimentName.INFINITE_CHAOS: InfiniteChaosParams,
    ExperimentName.CENTRAL_NONCENTRAL: CentralNoncentralParams,
    ExperimentName.COUNTEREXAMPLE: CounterexampleParams,
    ExperimentName.SDE: SDEParams,
    ExperimentName.HURST: HurstParams,
}


class ExperimentConfig(BaseModel):
    """One experiment run: which experiment, its parameters and run settings."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    experiment: ExperimentName
    params: ExperimentParams
    seed: int = Field(ge=0, le=U64_MAX)
    output_dir: Path
    self_check: bool = False
    error_strategy: ErrorStrategy = ErrorStrategy.HALT
    max_retries: int = Field(default=2, ge=0)
    workers: int = Field(default=4, ge=1)
    chunk_size: int = Field(default=1024, ge=1)
    write_samples: bool = False

    def echo(self) -> dict[str, Any]:
        """Plain-data copy of the configuration for the manifest."""
        return {
            "experiment": self.experiment.value,
            "seed": self.seed,
            "self_check": self.self_check,
            "error_strategy": self.error_strategy.value,
            "max_retries": self.max_retries,
            "chunk_size": self.chunk_size,
            "write_samples": self.write_samples,
            "params": self.params.model_dump(mode="json"),
        }


# keys of a config file that belong to the run rather than the experiment
RUN_KEYS = ("seed", "error_strategy", "max_retries", "workers", "chunk_size", "write_samples")


def _format_validation(error: ValidationError) -> str:
    parts = []
    for item in error.errors():
        location = ".".join(str(part) for part in item["loc"]) or "config"
        parts.append(f"{location}: {item['msg']}")
    return "; ".join(parts)


def build_config(
    experiment: ExperimentName | str,
    entries: dict[str, str],
    output_dir: str | Path,
    seed: int | None = None,
    self_check: bool = False,
    workers: int | None = None,
) -> ExperimentConfig:
    """Validate parsed entries into an ExperimentConfig.

    A ``seed`` given here overrides one in the entries.

    Raises:
        ConfigError: On unknown keys, invalid values or a missing seed
    """
    try:
        name = ExperimentName(experiment)
    except ValueError as e:
        known = ", ".join(n.value for n in ExperimentName)
        raise ConfigError(f"Unknown experiment {experiment!r}; expected one of {known}") from e

    run = {key: entries[key] for key in RUN_KEYS if key in entries}
    params = {key: value for key, value in entries.items() if key not in RUN_KEYS}
    if seed is not None:
        run["seed"] = seed
    if "seed" not in run:
        raise ConfigError("No seed given on the command line or in the config file")
    if workers is not None and "workers" not in run:
        run["workers"] = workers

    try:
        model = PARAMS_MODELS[name].model_validate(params)
        config = ExperimentConfig(
            experiment=name, params=model, output_dir=Path(output_dir), self_check=self_check, **run
        )
    except ValidationError as e:
        raise ConfigError(f"Invalid {name.value} configuration: {_format_validation(e)}") from e
    logger.debug(f"Loaded {name.value} configuration with seed {config.seed}")
    return config


def load_experiment_config(
    experiment: ExperimentName | str,
    path: str | Path | None,
    output_dir: str | Path,
    seed: int | None = None,
    self_check: bool = False,
    workers: int | None = None,
) -> ExperimentConfig:
    """Read a key = value file (or defaults when ``path`` is None) into a config."""
    entries: dict[str, str] = {}
    if path is not None:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as e:
            raise ConfigError(f"Cannot read config file {path}: {e}") from e
        entries = parse_key_values(text)
    return build_config(experiment, entries, output_dir, seed, self_check, workers)
