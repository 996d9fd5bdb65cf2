"""Discrete-event simulation of the closed network."""

from .energy import EnergyMeter, replay_trace
from .engine import NetworkSimulator, SimulationListener, Task, station_rng

__all__ = [
    "EnergyMeter",
    "NetworkSimulator",
    "SimulationListener",
    "Task",
    "replay_trace",
    "station_rng",
]
