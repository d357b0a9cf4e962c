"""Contextual GP bandits for container orchestration, with a seeded cloud simulator."""

from .encoding import ActionSpace, ActionVector, ContextVector
from .gp import ContractError, DataWindow, KernelParams, NumericalError
from .harness import ExperimentConfig, run_experiment
from .private import ResourceLimit, SafeBandit
from .public import GpBandit, PublicBandit, ZetaSchedule
from .sim import SimEnv, builtin_scenario

__version__ = "0.1.0"

__all__ = [
    "ActionSpace", "ActionVector", "ContextVector", "ContractError", "DataWindow",
    "ExperimentConfig", "GpBandit", "KernelParams", "NumericalError", "PublicBandit",
    "ResourceLimit", "SafeBandit", "SimEnv", "ZetaSchedule", "builtin_scenario", "run_experiment",
]
