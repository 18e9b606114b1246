"""Experiment laboratory: configuration, runners, rate fits and output files."""

from ..exceptions import ConfigError
from ..execution.events import EventEmitter
from .config import (
    ExperimentConfig,
    ExperimentName,
    build_config,
    load_experiment_config,
    parse_key_values,
    parse_schedule,
)
from .experiments import EXPERIMENTS, create_experiment
from .output import OutputManager, RunManifest, load_manifest, load_results, load_samples
from .rates import Prediction, RateFit, rate_fit
from .runner import Experiment, ExperimentRunner


def run_experiment(
    config: ExperimentConfig, event_emitter: EventEmitter | None = None
) -> RunManifest:
    """Run the experiment ``config`` names and write its output directory."""
    experiment = create_experiment(config.experiment, config.params)
    return ExperimentRunner(config, experiment, event_emitter).run()


def _run_named(
    name: ExperimentName, config: ExperimentConfig, event_emitter: EventEmitter | None
) -> RunManifest:
    if config.experiment is not name:
        raise ConfigError(f"Configuration is for {config.experiment.value}, not {name.value}")
    return run_experiment(config, event_emitter)


def run_joint_clt(config: ExperimentConfig, event_emitter: EventEmitter | None = None) -> RunManifest:
    return _run_named(ExperimentName.JOINT_CLT, config, event_emitter)


def run_infinite_chaos(
    config: ExperimentConfig, event_emitter: EventEmitter | None = None
) -> RunManifest:
    return _run_named(ExperimentName.INFINITE_CHAOS, config, event_emitter)


def run_central_noncentral(
    config: ExperimentConfig, event_emitter: EventEmitter | None = None
) -> RunManifest:
    return _run_named(ExperimentName.CENTRAL_NONCENTRAL, config, event_emitter)


def run_counterexample(
    config: ExperimentConfig, event_emitter: EventEmitter | None = None
) -> RunManifest:
    return _run_named(ExperimentName.COUNTEREXAMPLE, config, event_emitter)


def run_sde_dependence(
    config: ExperimentConfig, event_emitter: EventEmitter | None = None
) -> RunManifest:
    return _run_named(ExperimentName.SDE, config, event_emitter)


def run_hurst_estimators(
    config: ExperimentConfig, event_emitter: EventEmitter | None = None
) -> RunManifest:
    return _run_named(ExperimentName.HURST, config, event_emitter)


__all__ = [
    "ExperimentConfig",
    "ExperimentName",
    "build_config",
    "load_experiment_config",
    "parse_key_values",
    "parse_schedule",
    "EXPERIMENTS",
    "create_experiment",
    "Experiment",
    "ExperimentRunner",
    "OutputManager",
    "RunManifest",
    "load_manifest",
    "load_results",
    "load_samples",
    "Prediction",
    "RateFit",
    "rate_fit",
    "run_experiment",
    "run_joint_clt",
    "run_infinite_chaos",
    "run_central_noncentral",
    "run_counterexample",
    "run_sde_dependence",
    "run_hurst_estimators",
]
