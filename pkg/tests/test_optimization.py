"""Tests for objectives and the routing optimizer."""

import numpy as np
import pytest

from src.config import Config
from src.exceptions import ConfigValidationError, OptimizationError
from src.models import ClientProfile, LearningConstants, ModelVariant, ObjectiveKind, ObjectiveSpec
from src.models.scenarios import edge_scenario, two_client_constants, two_client_scenario
from src.network import minimal_energy
from src.services import ObjectiveFactory, RoutingOptimizer
from src.services.optimization_service import (
    AdamOptimizer,
    softmax_chain_rule,
    softmax_probabilities,
    softmax_routing,
)

from .conftest import make_config
from .test_analysis import central_difference


def energy_clients():
    cheap = ClientProfile(mu_d=1.0, mu_c=1.0, mu_u=1.0, p_c=1.0)
    costly = ClientProfile(mu_d=1.0, mu_c=1.0, mu_u=1.0, p_c=4.0)
    return [cheap, costly]


def test_softmax_routing_is_interior():
    routing = softmax_routing([0.0, 50.0, -50.0])
    assert sum(routing.p) == pytest.approx(1.0)
    assert all(v > 0 for v in routing.p)
    assert softmax_routing([1.0, 1.0]).p == pytest.approx((0.5, 0.5))


def test_softmax_chain_rule_matches_finite_differences(rng):
    weights = rng.standard_normal(4)
    theta = rng.standard_normal(4)

    def h(t):
        return float(np.log(softmax_probabilities(t)) @ weights + softmax_probabilities(t) @ weights ** 2)

    p = softmax_probabilities(theta)
    grad_p = weights / p + weights ** 2
    approx = central_difference(h, theta)
    assert np.allclose(softmax_chain_rule(p, grad_p), approx, atol=1e-7)


def test_adam_step_decays():
    adam = AdamOptimizer(step=0.1, decay=0.5)
    assert adam.learning_rate(0) == pytest.approx(0.1)
    assert adam.learning_rate(3) == pytest.approx(0.0125)
    x = adam.iterate(0, np.array([1.0]), np.array([2.0]))
    # first bias-corrected step has length step
    assert x == pytest.approx([0.9], abs=1e-6)


@pytest.mark.parametrize(
    "kind",
    [ObjectiveKind.MIN_ROUNDS, ObjectiveKind.MAX_THROUGHPUT, ObjectiveKind.MIN_TIME, ObjectiveKind.MIN_ENERGY],
)
def test_objective_gradients_match_finite_differences(fast_slow_config, kind):
    consts = LearningConstants(delta=1.0, l_smooth=1.0, sigma=1.0, m_dissim=1.0, g_bound=2.0)
    spec = ObjectiveSpec(kind=kind, eps=0.1, consts=consts)
    objective = ObjectiveFactory.create_objective(fast_slow_config, spec)
    p = np.array([0.4, 0.6])
    _, grad = objective.value_and_gradient(p, 3)
    approx = central_difference(lambda q: objective.value(q, 3), p)
    assert np.allclose(grad, approx, rtol=1e-5, atol=1e-6 * np.abs(grad).max())


def test_joint_objective_gradient_with_cs(fast_slow_config):
    consts = LearningConstants(delta=1.0, l_smooth=1.0, sigma=1.0, m_dissim=1.0, g_bound=2.0)
    spec = ObjectiveSpec(
        kind=ObjectiveKind.JOINT_TIME_ENERGY,
        eps=0.1,
        consts=consts,
        model=ModelVariant.WITH_CS,
        rho=0.3,
        tau_star=100.0,
        energy_star=50.0,
    )
    objective = ObjectiveFactory.create_objective(fast_slow_config, spec)
    p = np.array([0.7, 0.3])
    _, grad = objective.value_and_gradient(p, 4)
    approx = central_difference(lambda q: objective.value(q, 4), p)
    assert np.allclose(grad, approx, rtol=1e-5, atol=1e-6 * np.abs(grad).max())


def test_min_energy_recovers_closed_form(unit_constants):
    config = make_config(energy_clients(), m=1)
    spec = ObjectiveSpec(kind=ObjectiveKind.MIN_ENERGY, eps=1.0, consts=unit_constants)
    result = RoutingOptimizer(Config(), seed=3).optimize_routing(config, spec, m=1, restarts=1)
    assert np.max(np.abs(result.p_star.as_array() - [2.0 / 3.0, 1.0 / 3.0])) < 1e-3
    objective = ObjectiveFactory.create_objective(config, spec)
    assert result.objective_value == pytest.approx(minimal_energy(objective.energy, unit_constants, 1.0), rel=1e-6)


def test_min_rounds_at_unit_concurrency_is_uniform(unit_constants, quick_settings):
    config = make_config(energy_clients(), m=1, p=[0.8, 0.2])
    spec = ObjectiveSpec(kind=ObjectiveKind.MIN_ROUNDS, eps=1.0, consts=unit_constants)
    result = RoutingOptimizer(quick_settings).optimize_routing(config, spec, m=1)
    assert result.p_star.p == pytest.approx((0.5, 0.5), abs=1e-2)
    assert result.restarts_used == quick_settings.restarts


def test_optimizer_never_worse_than_its_start(quick_settings):
    config = two_client_scenario(heterogeneous=True, m=4)
    spec = ObjectiveSpec(kind=ObjectiveKind.MIN_TIME, eps=0.1, consts=two_client_constants())
    start = ObjectiveFactory.create_objective(config, spec).value(config.routing.as_array(), 4)
    result = RoutingOptimizer(quick_settings).optimize_routing(config, spec, m=4)
    assert result.objective_value <= start * (1.0 + 1e-12)
    assert result.m_star == 4
    assert result.trace[0][0] == 0


def test_search_concurrency_keeps_best_level(quick_settings):
    config = two_client_scenario(heterogeneous=True)
    spec = ObjectiveSpec(kind=ObjectiveKind.MIN_TIME, eps=0.1, consts=two_client_constants())
    result = RoutingOptimizer(quick_settings).search_concurrency(config, spec, range(2, 12))
    assert result.m_star in result.level_values
    assert result.objective_value == pytest.approx(min(result.level_values.values()))
    assert sorted(result.level_values) == list(result.level_values)


def test_search_concurrency_rejects_bad_ranges(unit_constants, quick_settings):
    config = two_client_scenario()
    spec = ObjectiveSpec(kind=ObjectiveKind.MIN_ROUNDS, eps=0.1, consts=unit_constants)
    optimizer = RoutingOptimizer(quick_settings)
    with pytest.raises(OptimizationError, match="empty"):
        optimizer.search_concurrency(config, spec, [])
    with pytest.raises(OptimizationError, match="ascending"):
        optimizer.search_concurrency(config, spec, [3, 2])


def test_zero_budget_is_rejected(unit_constants):
    config = two_client_scenario()
    spec = ObjectiveSpec(kind=ObjectiveKind.MIN_ROUNDS, eps=0.1, consts=unit_constants)
    with pytest.raises(OptimizationError, match="budget"):
        RoutingOptimizer(Config()).optimize_routing(config, spec, m=2, budget=0)


def test_pareto_endpoints(unit_constants, quick_settings):
    config = make_config(energy_clients(), m=2)
    points = RoutingOptimizer(quick_settings).pareto_sweep(
        config, [0.0, 0.5, 1.0], eps=1.0, consts=unit_constants, m_range=range(1, 5)
    )
    assert [point.rho for point in points] == [0.0, 0.5, 1.0]
    assert points[0].time_norm == pytest.approx(1.0)
    assert points[-1].m_star == 1
    assert points[-1].energy_norm == pytest.approx(1.0)
    assert points[-1].p_star.p == pytest.approx((2.0 / 3.0, 1.0 / 3.0))
    assert all(point.time_norm >= 1.0 - 1e-3 for point in points)
    assert all(point.energy_norm >= 1.0 - 1e-9 for point in points)


def test_pareto_rejects_rho_outside_unit_interval(unit_constants, quick_settings):
    with pytest.raises(OptimizationError, match="rho"):
        RoutingOptimizer(quick_settings).pareto_sweep(two_client_scenario(), [1.5], 0.1, unit_constants)


def test_objective_spec_validation(unit_constants):
    with pytest.raises(ConfigValidationError, match="rho"):
        ObjectiveSpec(kind=ObjectiveKind.JOINT_TIME_ENERGY, eps=0.1, consts=unit_constants)
    with pytest.raises(ConfigValidationError, match="rho"):
        ObjectiveSpec(kind=ObjectiveKind.MIN_TIME, eps=0.1, consts=unit_constants, rho=0.5)
    with pytest.raises(ConfigValidationError, match="eps"):
        ObjectiveSpec(kind=ObjectiveKind.MIN_TIME, eps=0.0, consts=unit_constants)


def test_joint_objective_needs_normalizers(unit_constants):
    spec = ObjectiveSpec(kind=ObjectiveKind.JOINT_TIME_ENERGY, eps=0.1, consts=unit_constants, rho=0.5)
    with pytest.raises(ConfigValidationError, match="tau_star"):
        ObjectiveFactory.create_objective(two_client_scenario(), spec)


def test_cs_objective_requires_cs_block(unit_constants):
    spec = ObjectiveSpec(kind=ObjectiveKind.MIN_TIME, eps=0.1, consts=unit_constants, model=ModelVariant.WITH_CS)
    with pytest.raises(ConfigValidationError, match="cs"):
        ObjectiveFactory.create_objective(two_client_scenario(), spec)


@pytest.mark.parametrize("heterogeneous", [False, True])
def test_min_time_has_interior_concurrency(quick_settings, heterogeneous):
    config = two_client_scenario(heterogeneous=heterogeneous)
    spec = ObjectiveSpec(kind=ObjectiveKind.MIN_TIME, eps=0.1, consts=two_client_constants())
    result = RoutingOptimizer(quick_settings).search_concurrency(config, spec, range(1, 31))
    values = result.level_values
    assert 1 < result.m_star < 30
    assert values[result.m_star - 1] >= values[result.m_star]
    assert values[result.m_star + 1] >= values[result.m_star]


@pytest.mark.parametrize("kind", [ObjectiveKind.MIN_ROUNDS, ObjectiveKind.MIN_ENERGY])
def test_rounds_and_energy_prefer_unit_concurrency(quick_settings, kind):
    config = make_config(energy_clients(), m=2)
    spec = ObjectiveSpec(kind=kind, eps=0.1, consts=two_client_constants())
    result = RoutingOptimizer(quick_settings).search_concurrency(config, spec, range(1, 7), patience=6)
    assert result.m_star == 1
    assert all(value > result.objective_value for m, value in result.level_values.items() if m > 1)


def test_pareto_frontier_is_monotone(quick_settings):
    consts = LearningConstants(delta=1.0, l_smooth=1.0, sigma=1.0, m_dissim=1.0, g_bound=2.0)
    config = make_config(energy_clients(), m=2)
    rhos = [0.0, 0.25, 0.5, 0.75, 1.0]
    points = RoutingOptimizer(quick_settings).pareto_sweep(config, rhos, eps=1.0, consts=consts, m_range=range(1, 8))
    for before, after in zip(points, points[1:]):
        assert after.energy_norm <= before.energy_norm * (1.0 + 1e-3)
        assert after.time_norm >= before.time_norm * (1.0 - 1e-3)


@pytest.mark.slow
def test_edge_scenario_min_time_stays_below_client_count(quick_settings):
    config = edge_scenario()
    spec = ObjectiveSpec(kind=ObjectiveKind.MIN_TIME, eps=0.1, consts=two_client_constants())
    result = RoutingOptimizer(quick_settings).search_concurrency(config, spec, range(2, 2 * config.n + 1))
    assert result.m_star < config.n
