"""Normalization constants of the closed network by Buzen's convolution."""

import itertools
import logging
import math
from typing import Optional, Sequence

import numpy as np
from scipy.special import comb, gammaln, logsumexp

from ..exceptions import ConfigValidationError, NormalizationOverflowError, StateSpaceTooLargeError
from ..models.network import ModelVariant, NormalizationTable
from ..models.system import ClientProfile
from .loads import RoutingLike, StationLoads, station_loads

logger = logging.getLogger(__name__)

DEFAULT_STATE_CAP = 2_000_000


def _single_server_levels(loads: np.ndarray, m: int) -> np.ndarray:
    """
    log of the single-server part of the constants for populations 0..m.

    Population levels are built one at a time over every station prefix,
    G(s, k) = G(s - 1, k) + load_s * G(s, k - 1). Each level is divided by
    its largest entry and the log of that entry accumulated, so the
    mantissas stay in [0, 1] whatever the loads.
    """
    logs = np.zeros(m + 1)
    level = np.ones(len(loads))
    for k in range(1, m + 1):
        level = np.cumsum(loads * level)
        top = level[-1]
        if not (np.isfinite(top) and top > 0.0):
            return logs[:k]
        logs[k] = logs[k - 1] + math.log(top)
        level = level / top
    return logs


def _infinite_server_fold(single_logs: np.ndarray, gamma_total: float) -> np.ndarray:
    """
    Fold the pooled infinite-server load into the single-server levels.

    Infinite-server stations combine into one with the summed load, so
    Z(k) = sum_i Zc(i) * gamma^(k - i) / (k - i)!, evaluated in log space.
    """
    m = len(single_logs) - 1
    js = np.arange(m + 1)
    weights = js * math.log(gamma_total) - gammaln(js + 1)
    lag = js[:, np.newaxis] - js[np.newaxis, :]
    terms = np.where(lag >= 0, weights[np.clip(lag, 0, None)] + single_logs[np.newaxis, :], -np.inf)
    return logsumexp(terms, axis=1)


def _convolve_stations(loads: StationLoads, m: int, variant: ModelVariant) -> NormalizationTable:
    if m < 0:
        raise ConfigValidationError(f"population must be >= 0, got {m}")

    single = loads.compute if loads.cs is None else np.append(loads.cs, loads.compute)
    gamma_total = float(np.sum(loads.gamma))
    if not (loads.max_single_server > 0.0 and gamma_total > 0.0):
        raise NormalizationOverflowError(
            "normalization constants need a positive load on some station",
            max_load=loads.max_load,
        )

    single_logs = _single_server_levels(single, m)
    if len(single_logs) < m + 1:
        raise NormalizationOverflowError(
            f"single-server levels not representable beyond population {len(single_logs) - 1}",
            max_load=loads.max_load,
        )
    log_z = _infinite_server_fold(single_logs, gamma_total)
    if not np.all(np.isfinite(log_z)):
        raise NormalizationOverflowError(
            f"normalization constants not representable up to population {m}",
            max_load=loads.max_load,
        )

    exponents = np.floor(log_z)
    return NormalizationTable(
        values=np.exp(log_z - exponents),
        exponents=exponents,
        log_scale=math.log(loads.max_single_server),
        variant=variant,
    )


def normalization_constants(
    profiles: Sequence[ClientProfile],
    p: RoutingLike,
    m: int,
) -> NormalizationTable:
    """
    Z_{n,0..m} of the network without the central-server queue.

    The compute queues are folded level by level, then the downlinks and
    uplinks as one pooled infinite-server station.

    Args:
        profiles: Client profiles
        p: Routing entries
        m: Largest population

    Returns:
        NormalizationTable with variant NO_CS
    """
    loads = station_loads(profiles, p)
    table = _convolve_stations(loads, m, ModelVariant.NO_CS)
    logger.debug("built Z table n=%d m=%d log Z_m=%.6g", len(profiles), m, table.log_constant(m))
    return table


def normalization_constants_with_cs(
    profiles: Sequence[ClientProfile],
    p: RoutingLike,
    m: int,
    mu_cs: float,
) -> NormalizationTable:
    """
    W_{n,0..m} of the network with the central-server queue.

    The CS queue joins the compute queues in the single-server levels;
    the links are pooled as in normalization_constants.

    Args:
        profiles: Client profiles
        p: Routing entries
        m: Largest population
        mu_cs: Central-server service rate

    Returns:
        NormalizationTable with variant WITH_CS
    """
    if mu_cs <= 0:
        raise ConfigValidationError(f"non-positive rate: mu_cs={mu_cs}")
    loads = station_loads(profiles, p, mu_cs=mu_cs)
    table = _convolve_stations(loads, m, ModelVariant.WITH_CS)
    logger.debug("built W table n=%d m=%d log W_m=%.6g", len(profiles), m, table.log_constant(m))
    return table


def build_table(
    profiles: Sequence[ClientProfile],
    p: RoutingLike,
    m: int,
    mu_cs: Optional[float] = None,
) -> NormalizationTable:
    """Dispatch to the NO_CS or WITH_CS recursion depending on mu_cs."""
    if mu_cs is None:
        return normalization_constants(profiles, p, m)
    return normalization_constants_with_cs(profiles, p, m, mu_cs)


def state_count(dimensions: int, k: int) -> int:
    """Number of ways to place k tasks on the given number of stations."""
    return int(comb(dimensions + k - 1, k, exact=True))


def brute_force_constant(
    profiles: Sequence[ClientProfile],
    p: RoutingLike,
    k: int,
    mu_cs: Optional[float] = None,
    state_cap: int = DEFAULT_STATE_CAP,
) -> float:
    """
    Sum the product-form weights over every state of population k.

    Args:
        profiles: Client profiles
        p: Routing entries
        k: Population
        mu_cs: Central-server rate; adds the aggregated CS station
        state_cap: Largest state space that may be enumerated

    Returns:
        The normalization constant at population k

    Raises:
        StateSpaceTooLargeError: If the state space exceeds state_cap
    """
    loads = station_loads(profiles, p, mu_cs=mu_cs)
    single = list(loads.compute)
    if loads.cs is not None:
        single.append(loads.cs)
    infinite = list(loads.downlink) + list(loads.uplink)
    dims = len(single) + len(infinite)

    count = state_count(dims, k)
    if count > state_cap:
        raise StateSpaceTooLargeError(
            f"{count} states at population {k} over {dims} stations exceeds cap {state_cap}"
        )

    single_arr = np.asarray(single)
    infinite_arr = np.asarray(infinite)
    log_fact = np.array([math.lgamma(x + 1) for x in range(k + 1)])
    total = 0.0
    # stars and bars: bar positions split k stars into dims groups
    for bars in itertools.combinations(range(k + dims - 1), dims - 1):
        edges = (-1,) + bars + (k + dims - 1,)
        occupancy = np.diff(edges) - 1
        x_single = occupancy[: len(single)]
        x_inf = occupancy[len(single):]
        weight = np.prod(single_arr ** x_single) * np.prod(infinite_arr ** x_inf)
        weight *= math.exp(-log_fact[x_inf].sum())
        total += weight
    return float(total)
