"""homesim: a deterministic, interactive smart-home simulator.

Virtual sensors sample a simulated home, a reasoning layer abstracts the
readings into high-level context facts and fires edge-triggered rules (with
case-based preference learning), actuators change appliance state, and
appliance state feeds back into the environment — steered live over a
message gateway or replayed headless from scenario files.
"""

from . import controller, engine, environment, gateway, model, protocol, reasoning, scenario, sensors
from .engine import World, run, snapshot, tick
from .scenario import load_builtin, load_scenario, load_scenario_file

__all__ = [
    "World",
    "controller",
    "engine",
    "environment",
    "gateway",
    "load_builtin",
    "load_scenario",
    "load_scenario_file",
    "model",
    "protocol",
    "reasoning",
    "run",
    "scenario",
    "sensors",
    "snapshot",
    "tick",
]

__version__ = "0.1.0"
