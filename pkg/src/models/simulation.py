"""Simulation data models."""

from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np

from ..exceptions import ConfigValidationError
from .network import ModelVariant
from .system import SystemConfig


class LawKind(str, Enum):
    """Service-time distribution family."""

    EXPONENTIAL = "exponential"
    DETERMINISTIC = "deterministic"
    LOGNORMAL = "lognormal"


class StationKind(str, Enum):
    """Station classes, in event tie-breaking order."""

    CS = "cs"
    DOWNLINK = "downlink"
    COMPUTE = "compute"
    UPLINK = "uplink"

    @property
    def priority(self) -> int:
        return _PRIORITY[self]


_PRIORITY = {
    StationKind.CS: 0,
    StationKind.DOWNLINK: 1,
    StationKind.COMPUTE: 2,
    StationKind.UPLINK: 3,
}


@dataclass(frozen=True)
class ServiceLaw:
    """Service-time law; every station keeps its own mean 1/mu."""

    kind: LawKind = LawKind.EXPONENTIAL
    lognormal_sigma: float = 1.0

    def to_dict(self) -> dict:
        """Convert to dictionary format."""
        return {"kind": self.kind.value, "lognormal_sigma": self.lognormal_sigma}


@dataclass(frozen=True)
class SimHorizon:
    """Stop after a total number of rounds (warmup included) or at a simulated time."""

    rounds: Optional[int] = None
    time_limit: Optional[float] = None

    def __post_init__(self):
        if self.rounds is None and self.time_limit is None:
            raise ConfigValidationError("horizon needs rounds or time_limit")
        if self.rounds is not None and self.rounds <= 0:
            raise ConfigValidationError(f"horizon rounds must be > 0, got {self.rounds}")
        if self.time_limit is not None and self.time_limit <= 0:
            raise ConfigValidationError(f"horizon time_limit must be > 0, got {self.time_limit}")


TraceRow = Tuple[float, str, str, int, int]


@dataclass
class EventTrace:
    """
    Station-level event log.

    Rows are (time, station, event, client, tasks_in_system) with event
    "arrive" or "depart" and client -1 for none. The measurement window
    [window_start, window_end] spans window_rounds applied updates.
    """

    config: SystemConfig
    model: ModelVariant
    rows: List[TraceRow] = field(default_factory=list)
    window_start: float = 0.0
    window_end: float = 0.0
    window_rounds: int = 0

    def record(self, time: float, station: StationKind, event: str, client: int, in_system: int) -> None:
        self.rows.append((time, station.value, event, client, in_system))

    def __len__(self) -> int:
        return len(self.rows)


@dataclass
class SimStats:
    """Statistics collected over the measurement window of one run."""

    rounds_completed: int
    sim_time: float
    empirical_throughput: float
    empirical_delays: np.ndarray
    per_client_update_fraction: np.ndarray
    energy_total: float
    energy_per_round: float
    warmup_discarded: int
    seed: int
    measured_tasks: int = 0
    throughput_se: float = 0.0
    delays_se: Optional[np.ndarray] = None
    update_fraction_se: Optional[np.ndarray] = None
    energy_per_round_se: float = 0.0
    model: ModelVariant = ModelVariant.NO_CS
    law: ServiceLaw = field(default_factory=ServiceLaw)
    trace: Optional[EventTrace] = field(default=None, repr=False)

    def to_dict(self) -> dict:
        """Convert to dictionary format."""
        n = len(self.empirical_delays)
        return {
            "rounds_completed": self.rounds_completed,
            "sim_time": self.sim_time,
            "empirical_throughput": self.empirical_throughput,
            "throughput_se": self.throughput_se,
            "empirical_delays": self.empirical_delays.tolist(),
            "delays_se": (self.delays_se if self.delays_se is not None else np.zeros(n)).tolist(),
            "per_client_update_fraction": self.per_client_update_fraction.tolist(),
            "update_fraction_se": (
                self.update_fraction_se if self.update_fraction_se is not None else np.zeros(n)
            ).tolist(),
            "energy_total": self.energy_total,
            "energy_per_round": self.energy_per_round,
            "energy_per_round_se": self.energy_per_round_se,
            "warmup_discarded": self.warmup_discarded,
            "measured_tasks": self.measured_tasks,
            "seed": self.seed,
            "model": self.model.value,
            "law": self.law.to_dict(),
        }
