"""Tests for delays, throughput and their derivatives."""

import numpy as np
import pytest

from src.exceptions import ConfigValidationError
from src.models import ClientProfile, ModelVariant
from src.network import (
    build_table,
    delay_jacobian,
    delay_jacobian_cs,
    delay_report,
    expected_delays,
    expected_delays_cs,
    operating_point,
    staleness_impact,
    throughput,
    throughput_cs,
    throughput_gradient,
)

from .conftest import UNIT, random_clients


def central_difference(func, p, step=1e-6):
    columns = []
    for j in range(len(p)):
        up, down = p.copy(), p.copy()
        up[j] += step
        down[j] -= step
        columns.append((np.asarray(func(up)) - np.asarray(func(down))) / (2 * step))
    return np.stack(columns, axis=-1)


def test_single_client_throughput():
    assert throughput(build_table([UNIT], [1.0], 1)) == pytest.approx(1.0 / 3.0)
    assert throughput(build_table([UNIT], [1.0], 2)) == pytest.approx(3.0 / 5.0)


def test_single_client_delay():
    table = build_table([UNIT], [1.0], 2)
    assert expected_delays(table, [UNIT], [1.0], 2) == pytest.approx([1.0])


def test_delays_vanish_at_unit_concurrency(rng):
    clients = random_clients(rng, 4)
    p = rng.dirichlet(np.ones(4))
    table = build_table(clients, p, 1)
    assert np.allclose(expected_delays(table, clients, p, 1), 0.0)


@pytest.mark.parametrize("m", [2, 5, 17, 50])
def test_delays_sum_to_m_minus_one(rng, m):
    clients = random_clients(rng, 5)
    p = rng.dirichlet(np.full(5, 2.0))
    table = build_table(clients, p, m)
    delays = expected_delays(table, clients, p, m)
    assert np.all(delays >= 0)
    assert delays.sum() == pytest.approx(m - 1, abs=1e-9 * m)


def test_delays_with_cs_sum_to_m_minus_one(fast_slow_config):
    config = fast_slow_config
    p = config.routing.as_array()
    mu_cs = config.cs.mu_cs
    table = build_table(config.clients, p, config.m, mu_cs=mu_cs)
    delays = expected_delays_cs(table, config.clients, p, config.m, mu_cs)
    assert delays.sum() == pytest.approx(config.m - 1, abs=1e-9)


def test_symmetric_clients_share_delay():
    table = build_table([UNIT] * 3, [1 / 3] * 3, 4)
    delays = expected_delays(table, [UNIT] * 3, [1 / 3] * 3, 4)
    assert delays == pytest.approx([1.0, 1.0, 1.0])


def test_delay_jacobian_matches_finite_differences(rng):
    clients = random_clients(rng, 3)
    p = rng.dirichlet(np.full(3, 2.0))
    m = 4

    def delays_at(q):
        return expected_delays(build_table(clients, q, m), clients, q, m)

    exact = delay_jacobian(build_table(clients, p, m), clients, p, m)
    approx = central_difference(delays_at, p)
    assert np.allclose(exact, approx, rtol=1e-5, atol=1e-6)


def test_cs_delay_jacobian_matches_finite_differences(fast_slow_config):
    config = fast_slow_config
    clients, mu_cs, m = config.clients, config.cs.mu_cs, config.m
    p = np.array([0.3, 0.7])

    def delays_at(q):
        return expected_delays_cs(build_table(clients, q, m, mu_cs=mu_cs), clients, q, m, mu_cs)

    exact = delay_jacobian_cs(build_table(clients, p, m, mu_cs=mu_cs), clients, p, m, mu_cs)
    approx = central_difference(delays_at, p)
    assert np.allclose(exact, approx, rtol=1e-5, atol=1e-6)


def test_throughput_gradient_matches_finite_differences(rng):
    clients = random_clients(rng, 3)
    p = rng.dirichlet(np.full(3, 2.0))
    m = 5

    def lam_at(q):
        return throughput(build_table(clients, q, m), m)

    exact = throughput_gradient(build_table(clients, p, m), clients, p, m)
    approx = central_difference(lam_at, p)
    assert np.allclose(exact, approx, rtol=1e-5, atol=1e-8)


def test_throughput_is_homogeneous_of_degree_minus_one(rng):
    clients = random_clients(rng, 4)
    p = rng.dirichlet(np.ones(4))
    point = operating_point(clients, p, 6)
    assert float(p @ point.lam_gradient) == pytest.approx(-point.lam, abs=1e-8)


def test_fast_central_server_recovers_model_without_cs(rng):
    clients = random_clients(rng, 3)
    p = rng.dirichlet(np.ones(3))
    m = 5
    without = operating_point(clients, p, m)
    with_fast_cs = operating_point(clients, p, m, mu_cs=1e6)
    assert with_fast_cs.lam == pytest.approx(without.lam, rel=1e-4)
    assert np.allclose(with_fast_cs.delays, without.delays, rtol=1e-4, atol=1e-6)


def test_slow_central_server_caps_throughput():
    point = operating_point([UNIT, UNIT], [0.5, 0.5], 30, mu_cs=0.5)
    assert point.lam < 0.5
    assert point.lam == pytest.approx(0.5, rel=1e-2)


def test_operating_point_agrees_with_separate_calls(fast_slow_config):
    config = fast_slow_config
    p = config.routing.as_array()
    point = operating_point(config.clients, p, config.m)
    table = build_table(config.clients, p, config.m)
    assert point.model is ModelVariant.NO_CS
    assert point.lam == pytest.approx(throughput(table, config.m))
    assert point.delays == pytest.approx(expected_delays(table, config.clients, p, config.m))
    assert np.allclose(point.jacobian, delay_jacobian(table, config.clients, p, config.m))
    assert np.allclose(point.lam_gradient, throughput_gradient(table, config.clients, p, config.m))


def test_delay_report_bundles_both_variants(fast_slow_config):
    config = fast_slow_config
    p = config.routing.as_array()
    table = build_table(config.clients, p, config.m, mu_cs=config.cs.mu_cs)
    report = delay_report(table, config.clients, p, config.m, mu_cs=config.cs.mu_cs)
    assert report.model is ModelVariant.WITH_CS
    assert report.jacobian.shape == (2, 2)
    assert report.to_dict()["model"] == "cs"


def test_table_variant_must_match_model():
    table = build_table([UNIT], [1.0], 2)
    with pytest.raises(ConfigValidationError, match="variant"):
        expected_delays_cs(table, [UNIT], [1.0], 2, 1.0)
    with pytest.raises(ConfigValidationError):
        throughput_cs(table)


def test_table_population_too_small():
    table = build_table([UNIT], [1.0], 2)
    with pytest.raises(ConfigValidationError):
        expected_delays(table, [UNIT], [1.0], 5)
    with pytest.raises(ConfigValidationError):
        throughput(table, 3)


def test_zero_concurrency_is_rejected():
    with pytest.raises(ConfigValidationError):
        operating_point([UNIT], [1.0], 0)


def test_staleness_impact():
    impact = staleness_impact(np.array([1.0, 2.0]), [0.5, 0.5])
    assert impact == pytest.approx([4.0, 8.0])


def test_unit_concurrency_operating_point():
    point = operating_point([UNIT, UNIT], [0.5, 0.5], 1)
    assert point.delays == pytest.approx([0.0, 0.0])
    assert np.allclose(point.jacobian, 0.0)
    assert point.lam == pytest.approx(1.0 / 3.0)
    assert np.all(np.isfinite(point.lam_gradient))


def test_unit_concurrency_operating_point_with_cs(fast_slow_config):
    config = fast_slow_config
    point = operating_point(config.clients, config.routing.as_array(), 1, mu_cs=config.cs.mu_cs)
    assert point.delays == pytest.approx([0.0, 0.0])
    assert np.allclose(point.jacobian, 0.0)
    assert point.lam > 0.0


@pytest.mark.parametrize("mu_cs", [None, 0.7])
def test_delay_jacobian_with_heavy_loads(rng, mu_cs):
    clients = [
        ClientProfile(mu_d=c.mu_d * 0.05, mu_c=c.mu_c * 0.05, mu_u=c.mu_u * 0.05)
        for c in random_clients(rng, 3)
    ]
    p = np.array([0.25, 0.35, 0.4])
    m = 4

    def delays_at(q):
        table = build_table(clients, q, m, mu_cs=mu_cs)
        return delay_report(table, clients, q, m, mu_cs=mu_cs).delays

    report = delay_report(build_table(clients, p, m, mu_cs=mu_cs), clients, p, m, mu_cs=mu_cs)
    approx = central_difference(delays_at, p)
    assert np.allclose(report.jacobian, approx, rtol=1e-5, atol=1e-6)
    # delays always sum to m - 1
    assert np.allclose(report.jacobian.sum(axis=0), 0.0, atol=1e-8)


def test_delays_are_invariant_to_a_common_rate_scale(rng):
    clients = random_clients(rng, 3)
    faster = [
        ClientProfile(mu_d=c.mu_d * 7.0, mu_c=c.mu_c * 7.0, mu_u=c.mu_u * 7.0)
        for c in clients
    ]
    p = np.array([0.2, 0.5, 0.3])
    base = operating_point(clients, p, 6)
    scaled = operating_point(faster, p, 6)
    assert scaled.delays == pytest.approx(base.delays, rel=1e-9)
    assert scaled.lam == pytest.approx(7.0 * base.lam, rel=1e-9)


def test_delays_grow_with_concurrency(rng):
    clients = random_clients(rng, 4)
    p = rng.dirichlet(np.full(4, 2.0))
    table = build_table(clients, p, 12)
    previous = np.zeros(4)
    for m in range(2, 13):
        delays = expected_delays(table, clients, p, m)
        assert np.all(delays >= previous - 1e-12)
        previous = delays
