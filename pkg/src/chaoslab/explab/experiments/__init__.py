"""The six experiments and the registry the CLI dispatches through."""

from ...exceptions import ConfigError
from ..config import ExperimentName, ExperimentParams
from ..runner import Experiment
from .central_noncentral import CentralNoncentralExperiment
from .counterexample import CounterexampleExperiment
from .hurst import HurstExperiment
from .infinite_chaos import InfiniteChaosExperiment
from .joint_clt import JointCLTExperiment
from .sde import SDEExperiment

EXPERIMENTS: dict[ExperimentName, type[Experiment]] = {
    ExperimentName.JOINT_CLT: JointCLTExperiment,
    ExperimentName.INFINITE_CHAOS: InfiniteChaosExperiment,
    ExperimentName.CENTRAL_NONCENTRAL: CentralNoncentralExperiment,
    ExperimentName.COUNTEREXAMPLE: CounterexampleExperiment,
    ExperimentName.SDE: SDEExperiment,
    ExperimentName.HURST: HurstExperiment,
}


def create_experiment(name: ExperimentName | str, params: ExperimentParams) -> Experiment:
    """Instantiate the experiment registered under ``name``.

    Raises:
        ConfigError: If no experiment has that name
    """
    try:
        experiment_class = EXPERIMENTS[ExperimentName(name)]
    except ValueError as e:
        raise ConfigError(f"Unknown experiment {name!r}") from e
    return experiment_class(params)


__all__ = [
    "EXPERIMENTS",
    "create_experiment",
    "JointCLTExperiment",
    "InfiniteChaosExperiment",
    "CentralNoncentralExperiment",
    "CounterexampleExperiment",
    "SDEExperiment",
    "HurstExperiment",
]
