"""
Closed-form steady-state metrics of the network.

Every quantity is built from ratios of normalization constants at the
population seen right after an update (m - 1 tasks). Loads are divided by
exp(table.log_scale) so every power and every ratio stays representable.
"""

import logging
import math
from typing import Optional, Sequence

import numpy as np
from scipy.linalg import hankel

from ..exceptions import ConfigValidationError
from ..models.network import (
    CoefficientTable,
    DelayReport,
    ModelVariant,
    NormalizationTable,
    OperatingPoint,
)
from ..models.system import ClientProfile
from .buzen import build_table
from .loads import RoutingLike, routing_array, station_loads

logger = logging.getLogger(__name__)


def _check_table(table: NormalizationTable, population: int, mu_cs: Optional[float]) -> None:
    if population < 0:
        raise ConfigValidationError(f"concurrency must be >= 1, got m={population + 1}")
    if table.population < population:
        raise ConfigValidationError(
            f"table population {table.population} below required {population}"
        )
    expected = ModelVariant.WITH_CS if mu_cs is not None else ModelVariant.NO_CS
    if table.variant is not expected:
        raise ConfigValidationError(
            f"table variant {table.variant.value} does not match model {expected.value}"
        )


def _coefficients_at(
    table: NormalizationTable,
    profiles: Sequence[ClientProfile],
    p: RoutingLike,
    population: int,
    mu_cs: Optional[float],
) -> CoefficientTable:
    _check_table(table, population, mu_cs)
    loads = station_loads(profiles, p, mu_cs=mu_cs)
    unit = math.exp(-table.log_scale)
    a = loads.compute * unit
    g = loads.gamma * unit
    n = len(a)
    big_m = population

    # R_j vanishes for j > big_m; index 2 must exist even at big_m = 0
    ratios = np.zeros(max(2 * big_m + 2, 3))
    ratios[: big_m + 1] = table.scaled_ratios(big_m)
    r1, r2 = ratios[1], ratios[2]

    if big_m == 0:
        zeros, square = np.zeros(n), np.zeros((n, n))
        beta1, beta2, alpha = zeros, zeros, square
        powers = np.zeros((n, 0))
        hank = np.zeros((0, 0))
    else:
        ks = np.arange(1, big_m + 1)
        powers = np.power.outer(a, ks)                  # a_i^k, k = 1..M
        beta1 = powers @ ratios[1: big_m + 1]
        # one ratio index more than load powers: carries one extra unit
        beta2 = unit * (powers @ ratios[2: big_m + 2])
        hank = hankel(ratios[2: big_m + 2], ratios[big_m + 1: 2 * big_m + 1])  # R_{k+l}
        alpha = powers @ hank @ powers.T
        np.fill_diagonal(alpha, powers @ ((2 * ks - 1) * ratios[1: big_m + 1]))

    psi = np.outer(g, g) * r2 + np.diag(g * r1)

    cs_fields = {}
    if mu_cs is not None:
        probs = routing_array(p)
        q = probs / probs.sum()
        c = loads.cs * unit
        if big_m == 0:
            beta_cs1 = beta_cs2 = 0.0
            alpha_cs_row = np.zeros(n)
            alpha_cs_pair = np.zeros((n, n))
        else:
            c_powers = c ** ks
            beta_cs1 = float(c_powers @ ratios[1: big_m + 1])
            beta_cs2 = unit * float(c_powers @ ratios[2: big_m + 2])
            alpha_cs_row = c_powers @ hank @ powers.T
            weighted = float((c_powers * (ks - 1)) @ ratios[1: big_m + 1])
            alpha_cs_pair = 2.0 * weighted * np.outer(q, q) + np.diag(q * beta_cs1)
        cs_fields = dict(
            cs_share=q,
            beta_cs1=beta_cs1,
            beta_cs2=beta_cs2,
            alpha_cs_row=alpha_cs_row,
            alpha_cs_pair=alpha_cs_pair,
        )

    return CoefficientTable(
        gamma=loads.gamma,
        beta1=beta1,
        beta2=beta2,
        alpha=alpha,
        psi=psi,
        ratio1=table.ratio(1, big_m),
        ratio2=table.ratio(2, big_m),
        **cs_fields,
    )


def coefficient_table(
    table: NormalizationTable,
    profiles: Sequence[ClientProfile],
    p: RoutingLike,
    m: int,
    mu_cs: Optional[float] = None,
) -> CoefficientTable:
    """
    Moment coefficients at population m - 1.

    Args:
        table: Normalization table of population >= m - 1
        profiles: Client profiles
        p: Routing entries (raw coordinates)
        m: Concurrency
        mu_cs: Central-server rate for W-tables

    Returns:
        CoefficientTable
    """
    return _coefficients_at(table, profiles, p, m - 1, mu_cs)


def expected_delays(
    table: NormalizationTable,
    profiles: Sequence[ClientProfile],
    p: RoutingLike,
    m: int,
) -> np.ndarray:
    """
    Expected relative delay of each client's updates.

    Args:
        table: NO_CS normalization table of population >= m - 1
        profiles: Client profiles
        p: Routing entries
        m: Concurrency

    Returns:
        Vector of n delays summing to m - 1
    """
    return coefficient_table(table, profiles, p, m).first_moments()


def delay_jacobian(
    table: NormalizationTable,
    profiles: Sequence[ClientProfile],
    p: RoutingLike,
    m: int,
) -> np.ndarray:
    """
    Partial derivatives of expected_delays with respect to raw p_j.

    Entry (i, j) is Cov(S_i, S_j) / p_j, where S_i counts client-i tasks
    at population m - 1.
    """
    coeffs = coefficient_table(table, profiles, p, m)
    return coeffs.covariance() / routing_array(p)[np.newaxis, :]


def expected_delays_cs(
    table_w: NormalizationTable,
    profiles: Sequence[ClientProfile],
    p: RoutingLike,
    m: int,
    mu_cs: float,
) -> np.ndarray:
    """Expected relative delays with the central-server queue (W-table)."""
    return coefficient_table(table_w, profiles, p, m, mu_cs=mu_cs).first_moments()


def delay_jacobian_cs(
    table_w: NormalizationTable,
    profiles: Sequence[ClientProfile],
    p: RoutingLike,
    m: int,
    mu_cs: float,
) -> np.ndarray:
    """Jacobian of expected_delays_cs with respect to raw p_j."""
    coeffs = coefficient_table(table_w, profiles, p, m, mu_cs=mu_cs)
    return coeffs.covariance() / routing_array(p)[np.newaxis, :]


def throughput(table: NormalizationTable, m: Optional[int] = None) -> float:
    """
    Rounds completed per unit time, Z_{m-1} / Z_m.

    Args:
        table: Normalization table
        m: Concurrency; defaults to the table population

    Returns:
        Throughput
    """
    m = table.population if m is None else m
    if m < 1 or m > table.population:
        raise ConfigValidationError(f"throughput needs 1 <= m <= {table.population}, got {m}")
    return table.ratio(1, m)


def throughput_cs(table_w: NormalizationTable, m: Optional[int] = None) -> float:
    """Throughput with the central-server queue, W_{m-1} / W_m."""
    if table_w.variant is not ModelVariant.WITH_CS:
        raise ConfigValidationError("throughput_cs needs a table built with the CS queue")
    return throughput(table_w, m)


def throughput_gradient(
    table: NormalizationTable,
    profiles: Sequence[ClientProfile],
    p: RoutingLike,
    m: int,
    mu_cs: Optional[float] = None,
) -> np.ndarray:
    """
    Partial derivatives of the throughput with respect to raw p_j.

    Uses expectations at populations m - 1 and m from one table:
    dlambda/dp_j = (lambda / p_j) * (E^{m-1}[S_j] - E^{m}[S_j]).

    Args:
        table: Normalization table of population >= m
        profiles: Client profiles
        p: Routing entries
        m: Concurrency
        mu_cs: Central-server rate for W-tables

    Returns:
        Gradient vector
    """
    lam = throughput(table, m)
    before = _coefficients_at(table, profiles, p, m - 1, mu_cs).first_moments()
    after = _coefficients_at(table, profiles, p, m, mu_cs).first_moments()
    return lam / routing_array(p) * (before - after)


def throughput_gradient_cs(
    table_w: NormalizationTable,
    profiles: Sequence[ClientProfile],
    p: RoutingLike,
    m: int,
    mu_cs: float,
) -> np.ndarray:
    """Throughput gradient with the central-server queue."""
    return throughput_gradient(table_w, profiles, p, m, mu_cs=mu_cs)


def delay_report(
    table: NormalizationTable,
    profiles: Sequence[ClientProfile],
    p: RoutingLike,
    m: int,
    mu_cs: Optional[float] = None,
) -> DelayReport:
    """Bundle delays and their Jacobian for either model variant."""
    coeffs = coefficient_table(table, profiles, p, m, mu_cs=mu_cs)
    return DelayReport(
        delays=coeffs.first_moments(),
        jacobian=coeffs.covariance() / routing_array(p)[np.newaxis, :],
        model=table.variant,
    )


def staleness_impact(delays: np.ndarray, p: RoutingLike) -> np.ndarray:
    """Per-client staleness factor E[D_i] / p_i^2."""
    probs = routing_array(p)
    return np.asarray(delays, dtype=float) / probs ** 2


def operating_point(
    profiles: Sequence[ClientProfile],
    p: RoutingLike,
    m: int,
    mu_cs: Optional[float] = None,
) -> OperatingPoint:
    """
    Delays, Jacobian, throughput and its gradient from one table build.

    Args:
        profiles: Client profiles
        p: Routing entries
        m: Concurrency (>= 1)
        mu_cs: Central-server rate, or None for the model without CS

    Returns:
        OperatingPoint
    """
    if m < 1:
        raise ConfigValidationError(f"concurrency must be >= 1, got m={m}")
    table = build_table(profiles, p, m, mu_cs=mu_cs)
    probs = routing_array(p)
    at_update = _coefficients_at(table, profiles, probs, m - 1, mu_cs)
    at_full = _coefficients_at(table, profiles, probs, m, mu_cs)
    delays = at_update.first_moments()
    lam = throughput(table, m)
    return OperatingPoint(
        table=table,
        delays=delays,
        jacobian=at_update.covariance() / probs[np.newaxis, :],
        lam=lam,
        lam_gradient=lam / probs * (delays - at_full.first_moments()),
        m=m,
    )
