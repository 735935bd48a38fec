"""Model-free set-back control for heat-pump thermostats.

Building blocks: a two-node thermal simulator, thermostat override logic,
auto-encoder history compression, fitted Q-iteration on an extra-trees
ensemble, Boltzmann exploration, and default/prescient baseline controllers,
wired together by an experiment harness.
"""

__version__ = "0.1.0"

from .building import BuildingParams, BuildingState
from .config import PRESETS, ExperimentConfig, load_config, save_config
from .env import ComfortSchedule, Plant, Transition, action_set
from .harness import ExperimentResult, run_experiment
from .thermostat import Latch, PhysicalAction, ThermostatParams
from .weather import ExogenousTrace, load_trace, save_trace, synthesize_trace

__all__ = [
    "BuildingParams", "BuildingState", "ComfortSchedule", "ExogenousTrace",
    "ExperimentConfig", "ExperimentResult", "Latch", "PRESETS",
    "PhysicalAction", "Plant", "ThermostatParams", "Transition", "action_set",
    "load_config", "load_trace", "run_experiment", "save_config", "save_trace",
    "synthesize_trace",
]
