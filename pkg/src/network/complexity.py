"""Round, time and energy complexity bounds of Generalized AsyncSGD."""

import logging
import math
from typing import Optional, Sequence

import numpy as np

from ..exceptions import ConfigValidationError
from ..models.network import (
    BoundVariant,
    ComplexityReport,
    EnergyProfile,
    ModelVariant,
    OperatingPoint,
)
from ..models.system import (
    ClientProfile,
    LearningConstants,
    RoutingVector,
    SystemConfig,
    rate_arrays,
)
from .analysis import operating_point
from .loads import RoutingLike, routing_array

logger = logging.getLogger(__name__)


def _check_eps(eps: float) -> None:
    if eps <= 0:
        raise ConfigValidationError(f"accuracy eps must be > 0, got {eps}")


def _sqrt_with_gradient(value: float, gradient: np.ndarray):
    if value <= 0.0:
        return 0.0, np.zeros_like(gradient)
    root = math.sqrt(value)
    return root, gradient / (2.0 * root)


def _staleness_sum(probs: np.ndarray, delays: np.ndarray) -> float:
    return float(np.sum(np.asarray(delays) / probs ** 2))


def _staleness_sum_gradient(probs: np.ndarray, delays: np.ndarray, jacobian: np.ndarray) -> np.ndarray:
    # d/dp_j sum_i D_i / p_i^2
    return (np.asarray(jacobian) / probs[:, np.newaxis] ** 2).sum(axis=0) - 2.0 * np.asarray(delays) / probs ** 3


def round_complexity(
    p: RoutingLike,
    m: int,
    delays: np.ndarray,
    consts: LearningConstants,
    eps: float,
) -> float:
    """
    Rounds needed to reach eps-accuracy under bounded gradients.

    Args:
        p: Routing entries
        m: Concurrency
        delays: Expected relative delays at (p, m)
        consts: Learning constants
        eps: Target accuracy

    Returns:
        Real-valued round count K_eps
    """
    _check_eps(eps)
    probs = routing_array(p)
    n = len(probs)
    lead = 24.0 * consts.l_smooth * consts.delta / (n * eps)
    first = (4.0 + consts.b / eps) * np.sum(1.0 / (n * probs))
    stale = consts.c * (m - 1) / eps * _staleness_sum(probs, delays)
    return float(lead * (first + math.sqrt(max(stale, 0.0))))


def round_complexity_gradient(
    p: RoutingLike,
    m: int,
    delays: np.ndarray,
    jacobian: np.ndarray,
    consts: LearningConstants,
    eps: float,
) -> np.ndarray:
    """Gradient of round_complexity with respect to raw p_j."""
    _check_eps(eps)
    probs = routing_array(p)
    n = len(probs)
    lead = 24.0 * consts.l_smooth * consts.delta / (n * eps)
    first = -(4.0 + consts.b / eps) / (n * probs ** 2)
    scale = consts.c * (m - 1) / eps
    _, stale = _sqrt_with_gradient(
        scale * _staleness_sum(probs, delays),
        scale * _staleness_sum_gradient(probs, delays, jacobian),
    )
    return lead * (first + stale)


def system_staleness(p: RoutingLike, m: int, profiles: Sequence[ClientProfile]) -> float:
    """
    System-wide staleness factor of the unbounded-gradient bound.

    (m - 1) * sum_k mu_k^u * sum_i (1/mu_i^d + 1/mu_i^u + m/mu_i^c) / p_i^2
    """
    probs = routing_array(p)
    mu_d, mu_c, mu_u = rate_arrays(profiles)
    weights = 1.0 / mu_d + 1.0 / mu_u + m / mu_c
    return float((m - 1) * mu_u.sum() * np.sum(weights / probs ** 2))


def _system_staleness_gradient(probs: np.ndarray, m: int, profiles: Sequence[ClientProfile]) -> np.ndarray:
    mu_d, mu_c, mu_u = rate_arrays(profiles)
    weights = 1.0 / mu_d + 1.0 / mu_u + m / mu_c
    return -2.0 * (m - 1) * mu_u.sum() * weights / probs ** 3


def round_complexity_unbounded(
    p: RoutingLike,
    m: int,
    delays: np.ndarray,
    profiles: Sequence[ClientProfile],
    consts: LearningConstants,
    eps: float,
) -> float:
    """
    Rounds needed to reach eps-accuracy without the bounded-gradient assumption.

    Args:
        p: Routing entries
        m: Concurrency
        delays: Expected relative delays at (p, m)
        profiles: Client profiles (service rates enter the staleness factor)
        consts: Learning constants (G is not used)
        eps: Target accuracy

    Returns:
        Real-valued round count K_eps
    """
    _check_eps(eps)
    probs = routing_array(p)
    n = len(probs)
    lead = 96.0 * consts.l_smooth * consts.delta / (n * eps)
    first = (2.0 + consts.b / eps) * np.sum(1.0 / (n * probs))
    system = math.sqrt((m - 1) * system_staleness(probs, m, profiles))
    stale = consts.b * (m - 1) / (2.0 * eps) * _staleness_sum(probs, delays)
    return float(lead * (first + system + math.sqrt(max(stale, 0.0))))


def round_complexity_unbounded_gradient(
    p: RoutingLike,
    m: int,
    delays: np.ndarray,
    jacobian: np.ndarray,
    profiles: Sequence[ClientProfile],
    consts: LearningConstants,
    eps: float,
) -> np.ndarray:
    """Gradient of round_complexity_unbounded with respect to raw p_j."""
    _check_eps(eps)
    probs = routing_array(p)
    n = len(probs)
    lead = 96.0 * consts.l_smooth * consts.delta / (n * eps)
    first = -(2.0 + consts.b / eps) / (n * probs ** 2)
    _, system = _sqrt_with_gradient(
        (m - 1) * system_staleness(probs, m, profiles),
        (m - 1) * _system_staleness_gradient(probs, m, profiles),
    )
    scale = consts.b * (m - 1) / (2.0 * eps)
    _, stale = _sqrt_with_gradient(
        scale * _staleness_sum(probs, delays),
        scale * _staleness_sum_gradient(probs, delays, jacobian),
    )
    return lead * (first + system + stale)


def max_learning_rate(
    p: RoutingLike,
    m: int,
    delays: np.ndarray,
    consts: LearningConstants,
    eps: float,
) -> float:
    """
    Largest learning rate covered by the bounded-gradient guarantee.

    Terms whose denominator vanishes (B = 0, or m = 1) are unbounded and
    drop out of the minimum.
    """
    _check_eps(eps)
    probs = routing_array(p)
    n = len(probs)
    inv_sum = float(np.sum(1.0 / probs))
    l_smooth = consts.l_smooth
    terms = [n ** 2 / (8.0 * l_smooth * inv_sum)]
    if consts.b > 0:
        terms.append(n ** 2 * eps / (2.0 * l_smooth * consts.b * inv_sum))
    stale = consts.c * (m - 1) * _staleness_sum(probs, delays)
    if stale > 0:
        terms.append(n * math.sqrt(eps) / (2.0 * l_smooth) / math.sqrt(stale))
    return float(min(terms))


def max_learning_rate_unbounded(
    p: RoutingLike,
    m: int,
    delays: np.ndarray,
    profiles: Sequence[ClientProfile],
    consts: LearningConstants,
    eps: float,
) -> float:
    """Four-term learning-rate ceiling of the unbounded-gradient guarantee."""
    _check_eps(eps)
    probs = routing_array(p)
    n = len(probs)
    inv_sum = float(np.sum(1.0 / probs))
    l_smooth = consts.l_smooth
    terms = [n ** 2 / (8.0 * l_smooth * inv_sum)]
    if consts.b > 0:
        terms.append(n ** 2 * eps / (4.0 * l_smooth * consts.b * inv_sum))
    stale = 2.0 * consts.b * (m - 1) * _staleness_sum(probs, delays)
    if stale > 0:
        terms.append(n * math.sqrt(eps) / (2.0 * l_smooth) / math.sqrt(stale))
    system = (m - 1) * system_staleness(probs, m, profiles)
    if system > 0:
        terms.append(n / (4.0 * l_smooth * math.sqrt(system)))
    return float(min(terms))


def expected_time(k_eps: float, lam: float) -> float:
    """Expected wall-clock time to accuracy: K_eps / lambda."""
    if lam <= 0:
        raise ConfigValidationError(f"throughput must be > 0, got {lam}")
    return k_eps / lam


def energy_profile(config: SystemConfig, model: ModelVariant = ModelVariant.NO_CS) -> EnergyProfile:
    """
    Per-task client energies and the CS cost per update.

    Args:
        config: System configuration
        model: The CS cost is only charged for WITH_CS

    Returns:
        EnergyProfile
    """
    per_task = np.array([client.energy_per_task for client in config.clients])
    cs_cost = 0.0
    if model is ModelVariant.WITH_CS:
        if config.cs is None:
            raise ConfigValidationError("model 'cs' requires a 'cs' block in the config")
        cs_cost = config.cs.p_cs / config.cs.mu_cs
    return EnergyProfile(per_task_cost=per_task, cs_cost=cs_cost)


def energy_per_round(p: RoutingLike, energy: EnergyProfile) -> float:
    """Expected energy spent per applied update; independent of m."""
    return float(energy.cs_cost + routing_array(p) @ energy.per_task_cost)


def expected_energy(k_eps: float, energy: EnergyProfile, p: RoutingLike) -> float:
    """Expected energy to accuracy: K_eps times the energy per round."""
    return k_eps * energy_per_round(p, energy)


def energy_optimal_routing(energy: EnergyProfile) -> RoutingVector:
    """
    Routing minimizing the m = 1 energy to accuracy: p_i proportional to
    1 / sqrt(cs_cost + E_i).

    Raises:
        ConfigValidationError: If some client has zero total cost
    """
    totals = energy.cs_cost + np.asarray(energy.per_task_cost, dtype=float)
    if np.any(totals <= 0):
        raise ConfigValidationError(
            f"energy-optimal routing undefined: zero cost at clients {np.flatnonzero(totals <= 0).tolist()}"
        )
    return RoutingVector.from_array(1.0 / np.sqrt(totals))


def minimal_energy(energy: EnergyProfile, consts: LearningConstants, eps: float) -> float:
    """Smallest expected energy to accuracy over all (p, m), reached at m = 1."""
    _check_eps(eps)
    totals = energy.cs_cost + np.asarray(energy.per_task_cost, dtype=float)
    n = len(totals)
    lead = 24.0 * consts.l_smooth * consts.delta / (n ** 2 * eps)
    return float(lead * (4.0 + consts.b / eps) * np.sum(np.sqrt(totals)) ** 2)


def complexity_report(
    config: SystemConfig,
    consts: LearningConstants,
    eps: float,
    model: ModelVariant = ModelVariant.NO_CS,
    bound_variant: BoundVariant = BoundVariant.BOUNDED_G,
    point: Optional[OperatingPoint] = None,
) -> ComplexityReport:
    """
    Assemble round, time and energy complexity at the config's (p, m).

    Args:
        config: System configuration
        consts: Learning constants
        eps: Target accuracy
        model: Whether the CS queue is modeled
        bound_variant: Bounded (default) or unbounded gradient bound
        point: Precomputed operating point, rebuilt when None

    Returns:
        ComplexityReport
    """
    p = config.routing.as_array()
    mu_cs = None
    if model is ModelVariant.WITH_CS:
        if config.cs is None:
            raise ConfigValidationError("model 'cs' requires a 'cs' block in the config")
        mu_cs = config.cs.mu_cs
    if point is None:
        point = operating_point(config.clients, p, config.m, mu_cs=mu_cs)

    if bound_variant is BoundVariant.UNBOUNDED_G:
        k_eps = round_complexity_unbounded(p, config.m, point.delays, config.clients, consts, eps)
        eta = max_learning_rate_unbounded(p, config.m, point.delays, config.clients, consts, eps)
    else:
        k_eps = round_complexity(p, config.m, point.delays, consts, eps)
        eta = max_learning_rate(p, config.m, point.delays, consts, eps)

    energy = energy_profile(config, model)
    per_round = energy_per_round(p, energy)
    report = ComplexityReport(
        k_eps=k_eps,
        eta_max=eta,
        tau_eps=expected_time(k_eps, point.lam),
        e_eps=k_eps * per_round,
        energy_per_round=per_round,
        lam=point.lam,
        model=model,
        bound_variant=bound_variant,
    )
    logger.debug("complexity at m=%d: K=%.6g tau=%.6g", config.m, k_eps, report.tau_eps)
    return report
