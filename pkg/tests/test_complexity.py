"""Tests for round, time and energy complexity."""

import numpy as np
import pytest

from src.exceptions import ConfigValidationError
from src.models import (
    BoundVariant,
    CentralServer,
    ClientProfile,
    EnergyProfile,
    LearningConstants,
    ModelVariant,
)
from src.network import (
    complexity_report,
    energy_optimal_routing,
    energy_per_round,
    energy_profile,
    expected_energy,
    expected_time,
    max_learning_rate,
    max_learning_rate_unbounded,
    minimal_energy,
    operating_point,
    round_complexity,
    round_complexity_gradient,
    round_complexity_unbounded,
    round_complexity_unbounded_gradient,
    system_staleness,
)

from .conftest import UNIT, make_config, random_clients
from .test_analysis import central_difference


def test_round_complexity_single_client(unit_constants):
    assert round_complexity([1.0], 1, np.zeros(1), unit_constants, eps=1.0) == pytest.approx(96.0)


def test_round_complexity_unbounded_single_client(unit_constants):
    delays = operating_point([UNIT], [1.0], 2).delays
    assert system_staleness([1.0], 2, [UNIT]) == pytest.approx(4.0)
    k = round_complexity_unbounded([1.0], 2, delays, [UNIT], unit_constants, eps=1.0)
    assert k == pytest.approx(384.0)


def test_expected_time():
    assert expected_time(96.0, 1.0 / 3.0) == pytest.approx(288.0)
    with pytest.raises(ConfigValidationError):
        expected_time(96.0, 0.0)


def test_energy_per_round_uniform():
    energy = EnergyProfile(per_task_cost=np.array([1.0, 1.0]))
    assert energy_per_round([0.5, 0.5], energy) == pytest.approx(1.0)


def test_energy_per_round_weighted():
    energy = EnergyProfile(per_task_cost=np.array([4.0, 0.0]))
    assert energy_per_round([0.25, 0.75], energy) == pytest.approx(1.0)


def test_energy_per_round_ignores_concurrency(fast_slow_config, unit_constants):
    low = complexity_report(fast_slow_config.with_concurrency(1), unit_constants, 0.1)
    high = complexity_report(fast_slow_config.with_concurrency(8), unit_constants, 0.1)
    assert low.energy_per_round == pytest.approx(high.energy_per_round)


def test_energy_optimal_routing():
    energy = EnergyProfile(per_task_cost=np.array([1.0, 4.0]))
    assert energy_optimal_routing(energy).p == pytest.approx((2.0 / 3.0, 1.0 / 3.0))


def test_energy_optimal_routing_reaches_minimal_energy(unit_constants):
    energy = EnergyProfile(per_task_cost=np.array([1.0, 4.0]))
    p = energy_optimal_routing(energy).as_array()
    k = round_complexity(p, 1, np.zeros(2), unit_constants, eps=1.0)
    assert expected_energy(k, energy, p) == pytest.approx(minimal_energy(energy, unit_constants, 1.0))
    # (sqrt(1) + sqrt(4))^2 = 9
    assert minimal_energy(energy, unit_constants, 1.0) == pytest.approx(24.0 / 4.0 * 4.0 * 9.0)


def test_energy_optimal_routing_rejects_zero_cost():
    with pytest.raises(ConfigValidationError, match="zero cost"):
        energy_optimal_routing(EnergyProfile(per_task_cost=np.array([0.0, 1.0])))


def test_cs_cost_is_charged_per_update(fast_slow_config):
    without = energy_profile(fast_slow_config)
    with_cs = energy_profile(fast_slow_config, ModelVariant.WITH_CS)
    assert without.cs_cost == 0.0
    assert with_cs.cs_cost == pytest.approx(1.0 / 5.0)
    assert energy_per_round([0.5, 0.5], with_cs) == pytest.approx(energy_per_round([0.5, 0.5], without) + 0.2)


def test_cs_model_requires_cs_block(single_client_config, unit_constants):
    with pytest.raises(ConfigValidationError, match="cs"):
        energy_profile(single_client_config, ModelVariant.WITH_CS)
    with pytest.raises(ConfigValidationError):
        complexity_report(single_client_config, unit_constants, 0.1, model=ModelVariant.WITH_CS)


def test_max_learning_rate_single_client(unit_constants):
    assert max_learning_rate([1.0], 1, np.zeros(1), unit_constants, eps=1e6) == pytest.approx(1.0 / 8.0)


def test_doubling_smoothness_halves_learning_rate(fast_slow_config):
    consts = LearningConstants(delta=1.0, l_smooth=1.0, sigma=1.0, m_dissim=2.0, g_bound=3.0)
    stiffer = LearningConstants(delta=1.0, l_smooth=2.0, sigma=1.0, m_dissim=2.0, g_bound=3.0)
    p = fast_slow_config.routing.as_array()
    delays = operating_point(fast_slow_config.clients, p, 3).delays
    base = max_learning_rate(p, 3, delays, consts, 0.1)
    assert max_learning_rate(p, 3, delays, stiffer, 0.1) == pytest.approx(base / 2.0)
    base_u = max_learning_rate_unbounded(p, 3, delays, fast_slow_config.clients, consts, 0.1)
    stiff_u = max_learning_rate_unbounded(p, 3, delays, fast_slow_config.clients, stiffer, 0.1)
    assert stiff_u == pytest.approx(base_u / 2.0)


def test_round_complexity_grows_with_concurrency_for_symmetric_clients():
    consts = LearningConstants(delta=1.0, l_smooth=1.0, sigma=1.0, m_dissim=1.0, g_bound=1.0)
    clients = [UNIT] * 4
    p = np.full(4, 0.25)
    values = [
        round_complexity(p, m, operating_point(clients, p, m).delays, consts, 0.1)
        for m in range(1, 9)
    ]
    assert all(b > a for a, b in zip(values, values[1:]))


def test_round_complexity_gradient_matches_finite_differences(rng):
    consts = LearningConstants(delta=2.0, l_smooth=1.5, sigma=0.5, m_dissim=1.0, g_bound=2.0)
    clients = random_clients(rng, 3)
    p = rng.dirichlet(np.full(3, 2.0))
    m = 4

    def k_at(q):
        return round_complexity(q, m, operating_point(clients, q, m).delays, consts, 0.1)

    point = operating_point(clients, p, m)
    exact = round_complexity_gradient(p, m, point.delays, point.jacobian, consts, 0.1)
    assert np.allclose(exact, central_difference(k_at, p), rtol=1e-5, atol=1e-6 * np.abs(exact).max())


def test_unbounded_gradient_matches_finite_differences(rng):
    consts = LearningConstants(delta=1.0, l_smooth=1.0, sigma=1.0, m_dissim=1.0)
    clients = random_clients(rng, 3)
    p = rng.dirichlet(np.full(3, 2.0))
    m = 3

    def k_at(q):
        return round_complexity_unbounded(q, m, operating_point(clients, q, m).delays, clients, consts, 0.1)

    point = operating_point(clients, p, m)
    exact = round_complexity_unbounded_gradient(p, m, point.delays, point.jacobian, clients, consts, 0.1)
    assert np.allclose(exact, central_difference(k_at, p), rtol=1e-5, atol=1e-6 * np.abs(exact).max())


def test_non_positive_eps_is_rejected(unit_constants):
    with pytest.raises(ConfigValidationError, match="eps"):
        round_complexity([1.0], 1, np.zeros(1), unit_constants, eps=0.0)


def test_complexity_report_single_client():
    consts = LearningConstants(delta=1.0, l_smooth=1.0)
    client = ClientProfile(mu_d=1.0, mu_c=1.0, mu_u=1.0, p_c=1.0)
    report = complexity_report(make_config([client], m=1), consts, eps=1.0)
    assert report.k_eps == pytest.approx(96.0)
    assert report.rounds == 96
    assert report.lam == pytest.approx(1.0 / 3.0)
    assert report.tau_eps == pytest.approx(288.0)
    assert report.energy_per_round == pytest.approx(1.0)
    assert report.e_eps == pytest.approx(96.0)
    assert report.eta_max == pytest.approx(1.0 / 8.0)
    assert report.bound_variant is BoundVariant.BOUNDED_G


def test_complexity_report_with_cs():
    consts = LearningConstants(delta=1.0, l_smooth=1.0)
    config = make_config([UNIT], m=2, cs=CentralServer(mu_cs=1e6, p_cs=0.0))
    with_cs = complexity_report(config, consts, 1.0, model=ModelVariant.WITH_CS)
    without = complexity_report(config, consts, 1.0)
    assert with_cs.model is ModelVariant.WITH_CS
    assert with_cs.lam == pytest.approx(without.lam, rel=1e-4)
    assert with_cs.lam < without.lam


def test_unbounded_report(unit_constants):
    report = complexity_report(
        make_config([UNIT], m=2), unit_constants, 1.0, bound_variant=BoundVariant.UNBOUNDED_G
    )
    assert report.k_eps == pytest.approx(384.0)
    assert report.to_dict()["bound_variant"] == "unbounded"
