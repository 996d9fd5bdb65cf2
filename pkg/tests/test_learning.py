"""Tests for Generalized AsyncSGD on the simulated network."""

import math

import numpy as np
import pytest

from src.exceptions import ConfigValidationError, DivergenceError
from src.models import (
    BoundVariant,
    FederatedTask,
    LawKind,
    LearningConstants,
    ModelVariant,
    ServiceLaw,
    Trajectory,
    TrajectoryRecord,
)
from src.models.scenarios import two_client_scenario
from src.network import max_learning_rate_unbounded, operating_point, round_complexity
from src.services import (
    RoutingOptimizer,
    estimate_constants,
    make_synthetic_task,
    run_generalized_async_sgd,
    run_strategy_study,
)
from src.services.learning_service import (
    STRATEGIES,
    default_eta_grid,
    energy_to_threshold,
    learning_rate_ceiling,
    rounds_to_threshold,
    strategy_configs,
    time_to_threshold,
)

from .conftest import UNIT, make_config


def scalar_task(w0=1.0) -> FederatedTask:
    """f(w) = w^2 / 2 on a single client."""
    return FederatedTask(designs=[np.array([[1.0]])], targets=[np.array([0.0])], w0=np.array([w0]), ridge=0.0)


def record(k, t, energy, loss):
    return TrajectoryRecord(k=k, t=t, energy=energy, loss=loss, grad_norm_sq=0.0, client=0, staleness=0)


def test_sequential_updates_contract_geometrically(single_client_config):
    trajectory = run_generalized_async_sgd(scalar_task(), single_client_config, ServiceLaw(), eta=0.1, rounds=50)
    assert len(trajectory) == 50
    assert trajectory.column("k").tolist() == list(range(1, 51))
    assert trajectory.final_w == pytest.approx([0.9 ** 50])
    losses = trajectory.column("loss")
    assert losses == pytest.approx(0.5 * 0.81 ** np.arange(1, 51))
    assert np.all(trajectory.column("staleness") == 0)


def test_trajectory_columns_are_monotone(fast_slow_config):
    task = make_synthetic_task(n=2, dim=3, seed=1)
    trajectory = run_generalized_async_sgd(task, fast_slow_config, ServiceLaw(), eta=0.05, rounds=300, seed=5)
    assert np.all(np.diff(trajectory.column("t")) >= 0)
    assert np.all(np.diff(trajectory.column("energy")) >= 0)
    assert np.all(trajectory.column("staleness") >= 0)
    assert set(trajectory.column("client").tolist()) <= {0, 1}
    assert trajectory.column("staleness").max() >= 1


def test_runs_are_reproducible(fast_slow_config):
    task = make_synthetic_task(n=2, dim=4, noise_sigma=0.5, seed=2)
    first = run_generalized_async_sgd(task, fast_slow_config, ServiceLaw(), eta=0.05, rounds=200, seed=8)
    second = run_generalized_async_sgd(task, fast_slow_config, ServiceLaw(), eta=0.05, rounds=200, seed=8)
    assert first.to_rows() == second.to_rows()
    other = run_generalized_async_sgd(task, fast_slow_config, ServiceLaw(), eta=0.05, rounds=200, seed=9)
    assert other.to_rows() != first.to_rows()


def test_deterministic_law_gives_exact_times(single_client_config):
    law = ServiceLaw(kind=LawKind.DETERMINISTIC)
    trajectory = run_generalized_async_sgd(scalar_task(), single_client_config, law, eta=0.1, rounds=5)
    assert trajectory.column("t") == pytest.approx([3.0, 6.0, 9.0, 12.0, 15.0])


def test_large_learning_rate_diverges(single_client_config):
    with pytest.raises(DivergenceError):
        run_generalized_async_sgd(scalar_task(), single_client_config, ServiceLaw(), eta=10.0, rounds=100)


@pytest.mark.parametrize("eta, rounds", [(0.0, 10), (-1.0, 10), (0.1, 0)])
def test_invalid_run_parameters(single_client_config, eta, rounds):
    with pytest.raises(ConfigValidationError):
        run_generalized_async_sgd(scalar_task(), single_client_config, ServiceLaw(), eta=eta, rounds=rounds)


def test_client_count_must_match(fast_slow_config):
    with pytest.raises(ConfigValidationError, match="clients"):
        run_generalized_async_sgd(scalar_task(), fast_slow_config, ServiceLaw(), eta=0.1, rounds=10)


def test_constants_of_scalar_task():
    consts = estimate_constants(scalar_task(w0=2.0))
    assert consts.l_smooth == pytest.approx(1.0)
    assert consts.delta == pytest.approx(2.0)
    assert consts.g_bound == pytest.approx(2.0)
    assert consts.m_dissim == pytest.approx(0.0)
    assert consts.sigma == 0.0


def test_homogeneous_clients_have_no_dissimilarity():
    task = make_synthetic_task(n=4, dim=5, heterogeneity=0.0, seed=3)
    assert estimate_constants(task).m_dissim == pytest.approx(0.0, abs=1e-10)


def test_dissimilarity_scales_with_heterogeneity():
    low = estimate_constants(make_synthetic_task(n=3, dim=4, heterogeneity=0.5, seed=4))
    high = estimate_constants(make_synthetic_task(n=3, dim=4, heterogeneity=1.0, seed=4))
    assert high.m_dissim == pytest.approx(2.0 * low.m_dissim, rel=1e-9)
    assert high.m_dissim > 0


def test_synthetic_task_start_point():
    task = make_synthetic_task(n=3, dim=6, seed=5, radius=2.5)
    w_star = task.minimizer()
    assert np.linalg.norm(task.gradient(w_star)) == pytest.approx(0.0, abs=1e-9)
    assert np.linalg.norm(task.w0 - w_star) == pytest.approx(2.5)
    assert task.n == 3
    assert task.dim == 6


def test_synthetic_task_rejects_empty_shapes():
    with pytest.raises(ConfigValidationError):
        make_synthetic_task(n=0, dim=3)


def test_threshold_crossings():
    trajectory = Trajectory(records=[record(1, 2.0, 5.0, 3.0), record(2, 4.0, 9.0, 0.5), record(3, 7.0, 12.0, 0.1)])
    assert time_to_threshold(trajectory, 1.0) == 4.0
    assert energy_to_threshold(trajectory, 1.0) == 9.0
    assert rounds_to_threshold(trajectory, 1.0) == 2.0
    assert math.isinf(time_to_threshold(trajectory, 0.01))


def test_default_eta_grid_halves(fast_slow_config):
    consts = LearningConstants(delta=1.0, l_smooth=2.0, sigma=1.0, m_dissim=1.0, g_bound=1.0)
    grid = default_eta_grid(fast_slow_config, consts, 0.1)
    assert grid[1] == pytest.approx(grid[0] / 2.0)
    assert grid[2] == pytest.approx(grid[0] / 4.0)
    assert grid[0] <= 1.0 / 16.0


def test_learning_rate_ceiling_follows_bound_variant(fast_slow_config):
    consts = LearningConstants(delta=1.0, l_smooth=2.0, sigma=1.0, m_dissim=1.0, g_bound=1.0)
    p = fast_slow_config.routing.as_array()
    m = fast_slow_config.m
    delays = operating_point(fast_slow_config.clients, p, m, mu_cs=fast_slow_config.cs.mu_cs).delays
    ceiling = learning_rate_ceiling(
        fast_slow_config, consts, 0.1, ModelVariant.WITH_CS, BoundVariant.UNBOUNDED_G
    )
    assert ceiling == pytest.approx(
        max_learning_rate_unbounded(p, m, delays, fast_slow_config.clients, consts, 0.1)
    )
    with pytest.raises(ConfigValidationError, match="cs"):
        learning_rate_ceiling(fast_slow_config.without_cs(), consts, 0.1, ModelVariant.WITH_CS)


def test_strategy_configs(quick_settings):
    config = two_client_scenario(heterogeneous=True, m=5)
    consts = LearningConstants(delta=1.0, l_smooth=1.0, sigma=1.0, m_dissim=1.0, g_bound=2.0)
    chosen = strategy_configs(
        config,
        consts,
        0.1,
        strategies=["uniform", "min-time", "max-throughput"],
        optimizer=RoutingOptimizer(quick_settings),
        m_range=range(2, 6),
    )
    assert list(chosen) == ["uniform", "min-time", "max-throughput"]
    assert chosen["uniform"].m == config.n
    assert chosen["uniform"].routing.p == (0.5, 0.5)
    assert chosen["max-throughput"].m == config.n
    assert 2 <= chosen["min-time"].m <= 5
    # the faster client gets the larger share
    assert chosen["max-throughput"].routing.p[1] > 0.5


def test_unknown_strategy_is_rejected(unit_constants, quick_settings):
    with pytest.raises(ConfigValidationError, match="Unsupported strategy"):
        strategy_configs(two_client_scenario(), unit_constants, 0.1, strategies=["fastest"])


def test_strategy_names():
    assert STRATEGIES == ("uniform", "min-time", "min-rounds", "max-throughput", "joint")


def test_study_reports_every_strategy(quick_settings):
    config = make_config([UNIT, UNIT], m=2)
    task = make_synthetic_task(n=2, dim=2, heterogeneity=0.2, seed=6)
    consts = estimate_constants(task)
    outcomes = run_strategy_study(
        config,
        task,
        consts,
        eps=0.1,
        threshold=task.optimal_loss() + 0.5 * (task.loss(task.w0) - task.optimal_loss()),
        rounds=200,
        seeds=[0, 1],
        strategies=["uniform", "min-rounds"],
        eta_grid=[0.2],
        settings=quick_settings,
    )
    assert set(outcomes) == {"uniform", "min-rounds"}
    for outcome in outcomes.values():
        assert outcome.eta == 0.2
        assert outcome.median_rounds >= 1
        assert math.isfinite(outcome.median_time)


@pytest.mark.slow
def test_full_study_on_heterogeneous_pair(quick_settings):
    config = two_client_scenario(heterogeneous=True)
    task = make_synthetic_task(n=2, dim=10, heterogeneity=1.0, noise_sigma=0.1, seed=0)
    consts = estimate_constants(task)
    threshold = task.optimal_loss() + 0.1 * (task.loss(task.w0) - task.optimal_loss())
    outcomes = run_strategy_study(
        config, task, consts, eps=0.1, threshold=threshold, rounds=5000, seeds=range(10), settings=quick_settings,
        m_range=range(2, 12),
    )
    assert set(outcomes) == set(STRATEGIES)
    assert all(math.isfinite(outcome.median_time) for outcome in outcomes.values())
    uniform = outcomes["uniform"]
    assert outcomes["min-time"].median_time < uniform.median_time
    assert outcomes["joint"].median_energy < uniform.median_energy
    assert uniform.median_rounds > outcomes["min-rounds"].median_rounds


@pytest.mark.slow
def test_average_gradient_norm_meets_accuracy_within_round_bound():
    config = two_client_scenario(m=2)
    task = make_synthetic_task(n=2, dim=2, heterogeneity=0.1, seed=4)
    consts = estimate_constants(task)
    start = task.gradient(task.w0)
    eps = 0.5 * float(start @ start)
    p = config.routing.as_array()
    delays = operating_point(config.clients, p, config.m).delays
    rounds = int(math.ceil(round_complexity(p, config.m, delays, consts, eps)))
    eta = learning_rate_ceiling(config, consts, eps)

    trajectory = run_generalized_async_sgd(task, config, ServiceLaw(), eta, rounds, seed=9)
    assert len(trajectory) == rounds
    assert trajectory.mean_grad_norm_sq() < eps
