"""Per-station loads of the closed network."""

from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from ..exceptions import ConfigValidationError
from ..models.system import ClientProfile, RoutingVector, rate_arrays

RoutingLike = Union[RoutingVector, Sequence[float], np.ndarray]


def routing_array(p: RoutingLike) -> np.ndarray:
    """Raw (not renormalized) routing entries as a float array."""
    if isinstance(p, RoutingVector):
        return p.as_array()
    return np.asarray(p, dtype=float)


@dataclass(frozen=True)
class StationLoads:
    """
    Visit-ratio over service-rate loads of every station.

    compute holds the single-server client stations, downlink and uplink the
    infinite-server links. cs is the aggregated central-server load
    (sum of routing entries over mu_cs), or None without the CS queue.
    """

    compute: np.ndarray
    downlink: np.ndarray
    uplink: np.ndarray
    cs: Optional[float] = None

    @property
    def gamma(self) -> np.ndarray:
        """Combined infinite-server load of each client."""
        return self.downlink + self.uplink

    @property
    def max_single_server(self) -> float:
        loads = self.compute
        if self.cs is not None:
            loads = np.append(loads, self.cs)
        return float(np.max(loads))

    @property
    def max_load(self) -> float:
        return float(max(self.max_single_server, np.max(self.downlink), np.max(self.uplink)))


def station_loads(
    profiles: Sequence[ClientProfile],
    p: RoutingLike,
    mu_cs: Optional[float] = None,
) -> StationLoads:
    """
    Compute the loads p_i / mu_i of every station.

    Args:
        profiles: Client profiles
        p: Routing entries (raw coordinates are allowed)
        mu_cs: Central-server service rate, or None

    Returns:
        StationLoads
    """
    probs = routing_array(p)
    if len(probs) != len(profiles):
        raise ConfigValidationError(f"routing has {len(probs)} entries for {len(profiles)} clients")
    mu_d, mu_c, mu_u = rate_arrays(profiles)
    cs = float(probs.sum() / mu_cs) if mu_cs is not None else None
    return StationLoads(compute=probs / mu_c, downlink=probs / mu_d, uplink=probs / mu_u, cs=cs)
