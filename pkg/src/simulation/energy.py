"""Piecewise-constant power integration over the network state."""

from typing import Optional

import numpy as np

from ..models.network import ModelVariant
from ..models.simulation import EventTrace, StationKind
from ..models.system import SystemConfig


class EnergyMeter:
    """
    Integrates the instantaneous power of the system.

    Power is P_c * 1{compute busy} + P_u * (tasks on uplink) + P_d * (tasks
    on downlink) per client, plus P_cs while the CS queue is non-empty.
    Energy is accumulated both over the whole run and over the
    [window_start, window_end] measurement window.
    """

    def __init__(self, config: SystemConfig, model: ModelVariant = ModelVariant.NO_CS):
        n = config.n
        self._p_d = np.array([c.p_d for c in config.clients])
        self._p_c = np.array([c.p_c for c in config.clients])
        self._p_u = np.array([c.p_u for c in config.clients])
        self._p_cs = config.cs.p_cs if (model is ModelVariant.WITH_CS and config.cs) else 0.0
        self._downlink = np.zeros(n, dtype=int)
        self._compute = np.zeros(n, dtype=int)
        self._uplink = np.zeros(n, dtype=int)
        self._cs = 0
        self._power = 0.0
        self._last = 0.0
        self.window_start: Optional[float] = None
        self.window_end: Optional[float] = None
        self.energy = 0.0
        self.lifetime_energy = 0.0

    @property
    def power(self) -> float:
        return self._power

    def _recompute(self) -> None:
        self._power = float(
            self._p_c @ (self._compute > 0)
            + self._p_u @ self._uplink
            + self._p_d @ self._downlink
            + (self._p_cs if self._cs > 0 else 0.0)
        )

    def advance(self, now: float) -> None:
        """Integrate the current power from the last update time up to now."""
        if now > self._last:
            self.lifetime_energy += self._power * (now - self._last)
            if self.window_start is not None:
                lo = max(self._last, self.window_start)
                hi = now if self.window_end is None else min(now, self.window_end)
                if hi > lo:
                    self.energy += self._power * (hi - lo)
            self._last = now

    def _counter(self, station: StationKind) -> Optional[np.ndarray]:
        if station is StationKind.DOWNLINK:
            return self._downlink
        if station is StationKind.COMPUTE:
            return self._compute
        if station is StationKind.UPLINK:
            return self._uplink
        return None

    def arrive(self, station: StationKind, client: int) -> None:
        counter = self._counter(station)
        if counter is None:
            self._cs += 1
        else:
            counter[client] += 1
        self._recompute()

    def depart(self, station: StationKind, client: int) -> None:
        counter = self._counter(station)
        if counter is None:
            self._cs -= 1
        else:
            counter[client] -= 1
        self._recompute()


def replay_trace(trace: EventTrace) -> EnergyMeter:
    """
    Feed a recorded trace through a fresh meter windowed like the run.

    Args:
        trace: Event trace recorded from time 0

    Returns:
        The meter after the last row
    """
    meter = EnergyMeter(trace.config, trace.model)
    meter.window_start = trace.window_start
    meter.window_end = trace.window_end
    for time, station, event, client, _ in trace.rows:
        meter.advance(time)
        kind = StationKind(station)
        if event == "arrive":
            meter.arrive(kind, client)
        else:
            meter.depart(kind, client)
    meter.advance(trace.window_end)
    return meter
