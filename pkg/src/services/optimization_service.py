"""Routing and concurrency optimization."""

import logging
from typing import Iterable, List, Optional, Sequence

import numpy as np

from ..config import Config
from ..exceptions import NormalizationOverflowError, OptimizationError
from ..models.network import BoundVariant, ModelVariant
from ..models.optimization import ObjectiveKind, ObjectiveSpec, OptimizationResult, ParetoPoint
from ..models.system import LearningConstants, RoutingVector, SystemConfig
from ..network import energy_optimal_routing, minimal_energy
from .objectives import BaseObjective, ObjectiveFactory, is_finite

logger = logging.getLogger(__name__)


def softmax_probabilities(theta: np.ndarray) -> np.ndarray:
    """Softmax with max-shift; every entry strictly positive."""
    shifted = np.exp(theta - np.max(theta))
    return shifted / shifted.sum()


def softmax_routing(theta: Sequence[float]) -> RoutingVector:
    """
    Map unconstrained parameters to an interior routing vector.

    Args:
        theta: n real parameters

    Returns:
        RoutingVector with p_j = exp(theta_j) / sum_i exp(theta_i)
    """
    return RoutingVector.from_array(softmax_probabilities(np.asarray(theta, dtype=float)))


def softmax_chain_rule(p: np.ndarray, grad_p: np.ndarray) -> np.ndarray:
    """Gradient in theta: dh/dtheta_j = p_j * (g_j - <g, p>)."""
    return p * (grad_p - grad_p @ p)


class AdamOptimizer:
    """Adam with bias correction and a geometric step decay."""

    def __init__(
        self,
        step: float = 0.05,
        momentum_1: float = 0.9,
        momentum_2: float = 0.999,
        epsilon: float = 1e-8,
        decay: float = 1.0,
    ):
        self.step = step
        self.momentum_1 = momentum_1
        self.momentum_2 = momentum_2
        self.epsilon = epsilon
        self.decay = decay
        self.reset()

    def reset(self) -> None:
        self.momentum_term_1 = 0.0
        self.momentum_term_2 = 0.0

    def learning_rate(self, t: int) -> float:
        return self.step * self.decay ** t

    def iterate(self, t: int, x: np.ndarray, grad: np.ndarray) -> np.ndarray:
        """One descent step from x at iteration t (0-based)."""
        self.momentum_term_1 = self.momentum_1 * self.momentum_term_1 + (1.0 - self.momentum_1) * grad
        self.momentum_term_2 = self.momentum_2 * self.momentum_term_2 + (1.0 - self.momentum_2) * grad ** 2
        m_hat = self.momentum_term_1 / (1.0 - self.momentum_1 ** (t + 1))
        v_hat = self.momentum_term_2 / (1.0 - self.momentum_2 ** (t + 1))
        return x - self.learning_rate(t) * m_hat / (np.sqrt(v_hat) + self.epsilon)


class RoutingOptimizer:
    """Service for optimizing routing and concurrency."""

    def __init__(self, settings: Optional[Config] = None, seed: Optional[int] = None):
        """
        Initialize the optimizer service.

        Args:
            settings: Optimizer knobs; defaults to Config()
            seed: Seed of the random restarts; defaults to settings.seed
        """
        self.settings = settings or Config()
        self.seed = self.settings.seed if seed is None else seed

    def _adam(self) -> AdamOptimizer:
        s = self.settings
        return AdamOptimizer(
            step=s.adam_step,
            momentum_1=s.adam_beta1,
            momentum_2=s.adam_beta2,
            epsilon=s.adam_epsilon,
            decay=s.adam_decay,
        )

    def _evaluate(self, objective: BaseObjective, p: np.ndarray, m: int):
        try:
            value, grad = objective.value_and_gradient(p, m)
        except (NormalizationOverflowError, FloatingPointError, ZeroDivisionError) as e:
            logger.warning("objective evaluation failed at m=%d: %s", m, e)
            return float("nan"), None
        if not is_finite(value) or not np.all(np.isfinite(grad)):
            return float("nan"), None
        return value, grad

    def _descend(self, objective: BaseObjective, theta: np.ndarray, m: int, budget: int):
        adam = self._adam()
        best_value, best_p = float("inf"), None
        trace = []
        for t in range(budget + 1):
            p = softmax_probabilities(theta)
            value, grad_p = self._evaluate(objective, p, m)
            if grad_p is None:
                if t == 0:
                    return None
                logger.warning("non-finite objective at iteration %d, m=%d; restart stopped", t, m)
                break
            trace.append((t, value))
            if value < best_value:
                best_value, best_p = value, p
            grad_theta = softmax_chain_rule(p, grad_p)
            if np.max(np.abs(grad_theta)) < self.settings.grad_tolerance or t == budget:
                break
            theta = adam.iterate(t, theta, grad_theta)
        return best_value, best_p, trace

    def optimize_routing(
        self,
        config: SystemConfig,
        objective: ObjectiveSpec,
        m: int,
        init: Optional[np.ndarray] = None,
        budget: Optional[int] = None,
        restarts: Optional[int] = None,
    ) -> OptimizationResult:
        """
        Minimize the objective over the simplex at fixed concurrency.

        The first start is init (or the config's own routing); the others
        draw theta ~ N(0, 1). The best iterate of every start is kept.

        Args:
            config: System configuration
            objective: Objective specification
            m: Concurrency (>= 1)
            init: Optional starting theta
            budget: Adam iterations per start; defaults to settings.iterations
            restarts: Number of starts; defaults to settings.restarts

        Returns:
            OptimizationResult at concurrency m

        Raises:
            OptimizationError: Zero budget, or a non-finite objective at every start
        """
        budget = self.settings.iterations if budget is None else budget
        restarts = self.settings.restarts if restarts is None else restarts
        if budget <= 0:
            raise OptimizationError(f"iteration budget must be > 0, got {budget}")
        if restarts < 1:
            raise OptimizationError(f"need at least one start, got {restarts}")
        scorer = ObjectiveFactory.create_objective(config, objective)

        n = config.n
        rng = np.random.default_rng(np.random.SeedSequence(self.seed, spawn_key=(m,)))
        warm = np.log(config.routing.as_array()) if init is None else np.asarray(init, dtype=float)
        starts = [warm] + [rng.standard_normal(n) for _ in range(restarts - 1)]

        best = None
        used = 0
        for index, theta in enumerate(starts):
            outcome = self._descend(scorer, theta, m, budget)
            if outcome is None:
                logger.warning("start %d at m=%d has a non-finite objective; skipped", index, m)
                continue
            used += 1
            value, p, trace = outcome
            logger.debug("start %d at m=%d: %.10g after %d iterations", index, m, value, len(trace))
            if best is None or value < best[0]:
                best = (value, p, trace)

        if best is None:
            raise OptimizationError(f"objective {objective.kind.value} non-finite at every start (m={m})")

        p_star = RoutingVector.from_array(best[1])
        value = scorer.value(p_star.as_array(), m)
        logger.info("optimized %s at m=%d: %.10g", objective.kind.value, m, value)
        return OptimizationResult(
            p_star=p_star,
            m_star=m,
            objective_value=value,
            trace=best[2],
            restarts_used=used,
            level_values={m: value},
        )

    def default_range(self, config: SystemConfig, kind: ObjectiveKind) -> range:
        """Concurrency levels searched when none are given."""
        start = 2 if kind is ObjectiveKind.MIN_TIME else 1
        return range(start, max(2 * config.n, 50) + 1)

    def search_concurrency(
        self,
        config: SystemConfig,
        objective: ObjectiveSpec,
        m_range: Optional[Iterable[int]] = None,
        patience: Optional[int] = None,
        budget: Optional[int] = None,
        restarts: Optional[int] = None,
    ) -> OptimizationResult:
        """
        Sequential search over concurrency with warm starts.

        Level m + 1 starts from the best routing of level m; the first level
        uses every restart and later levels only the warm start. The search
        stops after `patience` consecutive levels without improvement.

        Args:
            config: System configuration
            objective: Objective specification
            m_range: Ascending concurrency levels
            patience: Non-improving levels tolerated
            budget: Adam iterations per start
            restarts: Starts at the first level

        Returns:
            Best OptimizationResult, with level_values for every level searched
        """
        levels = list(m_range) if m_range is not None else list(self.default_range(config, objective.kind))
        if not levels:
            raise OptimizationError("concurrency range is empty")
        if any(b <= a for a, b in zip(levels, levels[1:])):
            raise OptimizationError(f"concurrency range must be ascending, got {levels}")
        patience = self.settings.patience if patience is None else patience

        best: Optional[OptimizationResult] = None
        level_values = {}
        theta = None
        stale_levels = 0
        for index, m in enumerate(levels):
            result = self.optimize_routing(
                config,
                objective,
                m,
                init=theta,
                budget=budget,
                restarts=restarts if index == 0 else 1,
            )
            level_values[m] = result.objective_value
            theta = np.log(result.p_star.as_array())
            if best is None or result.objective_value < best.objective_value:
                best = result
                stale_levels = 0
            else:
                stale_levels += 1
                if stale_levels >= patience:
                    logger.info("concurrency search stopped at m=%d (best m=%d)", m, best.m_star)
                    break

        best.level_values = level_values
        return best

    def pareto_sweep(
        self,
        config: SystemConfig,
        rho_list: Sequence[float],
        eps: float,
        consts: LearningConstants,
        model: ModelVariant = ModelVariant.NO_CS,
        bound_variant: BoundVariant = BoundVariant.BOUNDED_G,
        m_range: Optional[Iterable[int]] = None,
        budget: Optional[int] = None,
        restarts: Optional[int] = None,
    ) -> List[ParetoPoint]:
        """
        Trace the time-energy frontier by sweeping the joint weight rho.

        tau_star comes from the MinTime search and energy_star from the
        closed-form energy optimum at m = 1; both are computed once.

        Args:
            config: System configuration
            rho_list: Weights in [0, 1]
            eps: Target accuracy
            consts: Learning constants
            model: Whether the CS queue is modeled
            bound_variant: Round-complexity bound
            m_range: Concurrency levels for the searches
            budget: Adam iterations per start
            restarts: Starts at the first level of each search

        Returns:
            One ParetoPoint per rho, in the given order
        """
        rhos = [float(rho) for rho in rho_list]
        bad = [rho for rho in rhos if not 0.0 <= rho <= 1.0]
        if bad:
            raise OptimizationError(f"rho values outside [0, 1]: {bad}")

        def spec(kind, **extra):
            return ObjectiveSpec(kind=kind, eps=eps, consts=consts, model=model, bound_variant=bound_variant, **extra)

        levels = list(m_range) if m_range is not None else None
        time_spec = spec(ObjectiveKind.MIN_TIME)
        fastest = self.search_concurrency(config, time_spec, levels, budget=budget, restarts=restarts)
        tau_star = fastest.objective_value

        evaluator = ObjectiveFactory.create_objective(config, time_spec)
        energy_star = minimal_energy(evaluator.energy, consts, eps)
        greenest = energy_optimal_routing(evaluator.energy)

        points = []
        for rho in rhos:
            if rho == 0.0:
                p_star, m_star = fastest.p_star, fastest.m_star
            elif rho == 1.0:
                p_star, m_star = greenest, 1
            else:
                joint = spec(ObjectiveKind.JOINT_TIME_ENERGY, rho=rho, tau_star=tau_star, energy_star=energy_star)
                joint_range = levels if levels is not None else list(self.default_range(config, joint.kind))
                result = self.search_concurrency(config, joint, joint_range, budget=budget, restarts=restarts)
                p_star, m_star = result.p_star, result.m_star
            tau, energy = evaluator.time_and_energy(p_star.as_array(), m_star)
            points.append(
                ParetoPoint(
                    rho=rho,
                    p_star=p_star,
                    m_star=m_star,
                    time_norm=tau / tau_star,
                    energy_norm=energy / energy_star,
                )
            )
            logger.info("pareto rho=%.3g: m=%d time=%.6g energy=%.6g", rho, m_star, tau / tau_star, energy / energy_star)
        return points


def optimize_routing(
    config: SystemConfig,
    objective: ObjectiveSpec,
    m: int,
    init: Optional[np.ndarray] = None,
    budget: Optional[int] = None,
    settings: Optional[Config] = None,
    seed: Optional[int] = None,
) -> OptimizationResult:
    """Optimize routing at fixed m with a default-configured RoutingOptimizer."""
    return RoutingOptimizer(settings, seed).optimize_routing(config, objective, m, init=init, budget=budget)


def search_concurrency(
    config: SystemConfig,
    objective: ObjectiveSpec,
    m_range: Optional[Iterable[int]] = None,
    patience: Optional[int] = None,
    settings: Optional[Config] = None,
    seed: Optional[int] = None,
) -> OptimizationResult:
    """Warm-started concurrency search with a default-configured RoutingOptimizer."""
    return RoutingOptimizer(settings, seed).search_concurrency(config, objective, m_range, patience)


def pareto_sweep(
    config: SystemConfig,
    rho_list: Sequence[float],
    eps: float,
    consts: LearningConstants,
    model: ModelVariant = ModelVariant.NO_CS,
    m_range: Optional[Iterable[int]] = None,
    settings: Optional[Config] = None,
    seed: Optional[int] = None,
) -> List[ParetoPoint]:
    """Time-energy frontier with a default-configured RoutingOptimizer."""
    return RoutingOptimizer(settings, seed).pareto_sweep(
        config, rho_list, eps, consts, model=model, m_range=m_range
    )
