"""Generalized AsyncSGD driven by the simulated network timeline."""

import logging
import math
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np

from ..config import Config
from ..exceptions import ConfigValidationError, DivergenceError
from ..models.learning import FederatedTask, StudyOutcome, Trajectory, TrajectoryRecord
from ..models.network import BoundVariant, ModelVariant
from ..models.optimization import ObjectiveKind, ObjectiveSpec
from ..models.simulation import ServiceLaw
from ..models.system import LearningConstants, SystemConfig, uniform_routing
from ..network import (
    energy_profile,
    max_learning_rate,
    max_learning_rate_unbounded,
    minimal_energy,
    operating_point,
)
from ..simulation import NetworkSimulator, SimulationListener, Task, station_rng
from .optimization_service import RoutingOptimizer

logger = logging.getLogger(__name__)

NOISE_STREAM = 6
DIVERGENCE_LOSS = 1e12
DEFAULT_RIDGE = 1e-6


def make_synthetic_task(
    n: int,
    dim: int,
    heterogeneity: float = 1.0,
    noise_sigma: float = 0.0,
    seed: int = 0,
    rows: Optional[int] = None,
    radius: float = 1.0,
    ridge: float = DEFAULT_RIDGE,
) -> FederatedTask:
    """
    Least-squares clients sharing one design matrix with shifted optima.

    Client i's optimum is w_c + heterogeneity * u_i, so the gradient
    dissimilarity grows linearly with heterogeneity. Random draws do not
    depend on heterogeneity or noise_sigma.

    Args:
        n: Number of clients
        dim: Parameter dimension
        heterogeneity: Spread of the per-client optima
        noise_sigma: Gradient noise scale (E||noise||^2 = noise_sigma^2)
        seed: Seed of the data
        rows: Rows of the design matrix; defaults to max(2 dim, 10)
        radius: Distance of w0 from the global minimizer
        ridge: Ridge term keeping every client strongly convex

    Returns:
        FederatedTask
    """
    if n < 1 or dim < 1:
        raise ConfigValidationError(f"task needs n >= 1 and dim >= 1, got n={n} dim={dim}")
    rows = rows or max(2 * dim, 10)
    rng = np.random.default_rng(seed)
    design = rng.standard_normal((rows, dim))
    center = rng.standard_normal(dim)
    offsets = rng.standard_normal((n, dim))
    direction = rng.standard_normal(dim)

    targets = [design @ (center + heterogeneity * offsets[i]) for i in range(n)]
    task = FederatedTask(
        designs=[design] * n,
        targets=targets,
        w0=np.zeros(dim),
        noise_sigma=noise_sigma,
        heterogeneity=heterogeneity,
        ridge=ridge,
        seed=seed,
    )
    task.w0 = task.minimizer() + radius * direction / np.linalg.norm(direction)
    return task


def estimate_constants(
    task: FederatedTask,
    sample_count: int = 64,
    radius: Optional[float] = None,
    seed: int = 0,
) -> LearningConstants:
    """
    Estimate the constants of the convergence bound.

    L is exact for quadratics. M and G are maximized over the minimizer and
    sample_count points on the sphere of the given radius around it.

    Args:
        task: Federated task
        sample_count: Points sampled on the sphere
        radius: Sphere radius; defaults to ||w0 - w*||
        seed: Seed of the sampled directions

    Returns:
        LearningConstants
    """
    if sample_count < 1:
        raise ConfigValidationError(f"sample_count must be >= 1, got {sample_count}")
    w_star = task.minimizer()
    radius = float(np.linalg.norm(task.w0 - w_star)) if radius is None else radius
    rng = np.random.default_rng(seed)
    directions = rng.standard_normal((sample_count, task.dim))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    points = np.vstack([w_star[np.newaxis, :], w_star + radius * directions])

    m_dissim = 0.0
    g_bound = 0.0
    for w in points:
        grads = task.client_gradients(w)
        mean = grads.mean(axis=0)
        m_dissim = max(m_dissim, float(np.max(np.linalg.norm(grads - mean, axis=1))))
        g_bound = max(g_bound, float(np.max(np.linalg.norm(grads, axis=1))))

    return LearningConstants(
        delta=task.loss(task.w0) - task.loss(w_star),
        l_smooth=float(np.max(np.linalg.eigvalsh(task.hessian()))),
        sigma=task.noise_sigma,
        m_dissim=m_dissim,
        g_bound=g_bound,
    )


class AsyncSGDListener(SimulationListener):
    """
    Applies Generalized AsyncSGD updates at the simulator's update epochs.

    Every dispatched task carries a copy of the model it was sent; when it
    is applied, the server steps with eta / (n p_i) times client i's
    stochastic gradient at that stale copy.
    """

    def __init__(self, task: FederatedTask, config: SystemConfig, eta: float, seed: int):
        self.task = task
        self.eta = eta
        self.scale = eta / (config.n * config.routing.as_array())
        self.w = np.array(task.w0, dtype=float)
        self.snapshots: Dict[int, np.ndarray] = {}
        self.records: List[TrajectoryRecord] = []
        self.noise_rng = station_rng(seed, NOISE_STREAM)
        self.simulator: Optional[NetworkSimulator] = None

    def on_dispatch(self, task: Task, now: float) -> None:
        self.snapshots[task.task_id] = self.w.copy()

    def _stochastic_gradient(self, client: int, w: np.ndarray) -> np.ndarray:
        grad = self.task.client_gradient(client, w)
        if self.task.noise_sigma > 0:
            noise = self.noise_rng.standard_normal(self.task.dim)
            grad = grad + self.task.noise_sigma * noise / math.sqrt(self.task.dim)
        return grad

    def on_apply(self, task: Task, now: float, delay: int) -> None:
        stale = self.snapshots.pop(task.task_id)
        client = task.client
        self.w = self.w - self.scale[client] * self._stochastic_gradient(client, stale)
        loss = self.task.loss(self.w)
        if not math.isfinite(loss) or loss > DIVERGENCE_LOSS:
            raise DivergenceError(
                f"loss {loss:.3g} after {self.simulator.updates_applied} updates (eta={self.eta})"
            )
        grad = self.task.gradient(self.w)
        self.records.append(
            TrajectoryRecord(
                k=self.simulator.updates_applied,
                t=now,
                energy=self.simulator.meter.lifetime_energy,
                loss=loss,
                grad_norm_sq=float(grad @ grad),
                client=client,
                staleness=delay,
            )
        )


def run_generalized_async_sgd(
    task: FederatedTask,
    config: SystemConfig,
    law: ServiceLaw,
    eta: float,
    rounds: int,
    seed: int = 0,
    model: ModelVariant = ModelVariant.NO_CS,
) -> Trajectory:
    """
    Train on the task with staleness produced by the simulated network.

    Args:
        task: Federated task
        config: System configuration; n must match the task
        law: Service-time law
        eta: Learning rate
        rounds: Number of updates K
        seed: Seed of the network and of the gradient noise
        model: Whether the CS queue is simulated

    Returns:
        Trajectory of K records

    Raises:
        DivergenceError: If the loss exceeds 1e12
    """
    if eta <= 0:
        raise ConfigValidationError(f"learning rate must be > 0, got {eta}")
    if rounds < 1:
        raise ConfigValidationError(f"rounds must be >= 1, got {rounds}")
    if task.n != config.n:
        raise ConfigValidationError(f"task has {task.n} clients, config has {config.n}")
    listener = AsyncSGDListener(task, config, eta, seed)
    simulator = NetworkSimulator(config, law, seed, model=model, listener=listener)
    listener.simulator = simulator
    simulator.run_updates(rounds)
    logger.info("async SGD finished %d updates, final loss %.6g", rounds, listener.records[-1].loss)
    return Trajectory(records=listener.records, eta=eta, seed=seed, final_w=listener.w)


def _first_crossing(trajectory: Trajectory, threshold: float, column: str) -> float:
    for record in trajectory.records:
        if record.loss <= threshold:
            return float(getattr(record, column))
    return float("inf")


def time_to_threshold(trajectory: Trajectory, threshold: float) -> float:
    """Wall-clock time of the first update with loss <= threshold (inf if never)."""
    return _first_crossing(trajectory, threshold, "t")


def energy_to_threshold(trajectory: Trajectory, threshold: float) -> float:
    """Energy spent when the loss first drops to the threshold (inf if never)."""
    return _first_crossing(trajectory, threshold, "energy")


def rounds_to_threshold(trajectory: Trajectory, threshold: float) -> float:
    """Updates applied when the loss first drops to the threshold (inf if never)."""
    return _first_crossing(trajectory, threshold, "k")


STRATEGIES = ("uniform", "min-time", "min-rounds", "max-throughput", "joint")


def strategy_configs(
    config: SystemConfig,
    consts: LearningConstants,
    eps: float,
    strategies: Sequence[str] = STRATEGIES,
    rho: float = 0.1,
    optimizer: Optional[RoutingOptimizer] = None,
    m_range: Optional[Iterable[int]] = None,
    model: ModelVariant = ModelVariant.NO_CS,
    bound_variant: BoundVariant = BoundVariant.BOUNDED_G,
) -> Dict[str, SystemConfig]:
    """
    Operating points of the compared strategies.

    uniform is the AsyncSGD baseline at m = n; min-rounds and
    max-throughput optimize p at m = n; min-time and joint also search m.
    """
    optimizer = optimizer or RoutingOptimizer()
    n = config.n
    baseline = config.with_routing(uniform_routing(n).p).with_concurrency(n)
    levels = list(m_range) if m_range is not None else None

    def spec(kind, **extra):
        return ObjectiveSpec(
            kind=kind, eps=eps, consts=consts, model=model, bound_variant=bound_variant, **extra
        )

    chosen = {}
    fastest = None
    unknown = [name for name in strategies if name not in STRATEGIES]
    if unknown:
        raise ConfigValidationError(f"Unsupported strategy: {unknown[0]}. Supported strategies: {', '.join(STRATEGIES)}")
    if "min-time" in strategies or "joint" in strategies:
        fastest = optimizer.search_concurrency(baseline, spec(ObjectiveKind.MIN_TIME), levels)

    for name in strategies:
        if name == "uniform":
            chosen[name] = baseline
        elif name == "min-time":
            chosen[name] = baseline.with_routing(fastest.p_star.p).with_concurrency(fastest.m_star)
        elif name == "min-rounds":
            result = optimizer.optimize_routing(baseline, spec(ObjectiveKind.MIN_ROUNDS), n)
            chosen[name] = baseline.with_routing(result.p_star.p)
        elif name == "max-throughput":
            result = optimizer.optimize_routing(baseline, spec(ObjectiveKind.MAX_THROUGHPUT), n)
            chosen[name] = baseline.with_routing(result.p_star.p)
        else:
            energy_star = minimal_energy(energy_profile(baseline, model), consts, eps)
            joint = spec(
                ObjectiveKind.JOINT_TIME_ENERGY,
                rho=rho,
                tau_star=fastest.objective_value,
                energy_star=energy_star,
            )
            joint_levels = levels if levels is not None else list(optimizer.default_range(baseline, joint.kind))
            result = optimizer.search_concurrency(baseline, joint, joint_levels)
            chosen[name] = baseline.with_routing(result.p_star.p).with_concurrency(result.m_star)
    return chosen


def learning_rate_ceiling(
    config: SystemConfig,
    consts: LearningConstants,
    eps: float,
    model: ModelVariant = ModelVariant.NO_CS,
    bound_variant: BoundVariant = BoundVariant.BOUNDED_G,
) -> float:
    """
    Largest learning rate of the chosen guarantee at the config's (p, m).

    Args:
        config: System configuration
        consts: Learning constants
        eps: Target accuracy
        model: Delays come from the CS network for WITH_CS
        bound_variant: Bounded or unbounded gradient guarantee

    Returns:
        eta_max

    Raises:
        ConfigValidationError: If WITH_CS is asked for without a CS block
    """
    mu_cs = None
    if model is ModelVariant.WITH_CS:
        if config.cs is None:
            raise ConfigValidationError("model 'cs' requires a 'cs' block in the config")
        mu_cs = config.cs.mu_cs
    p = config.routing.as_array()
    delays = operating_point(config.clients, p, config.m, mu_cs=mu_cs).delays
    if bound_variant is BoundVariant.UNBOUNDED_G:
        return max_learning_rate_unbounded(p, config.m, delays, config.clients, consts, eps)
    return max_learning_rate(p, config.m, delays, consts, eps)


def default_eta_grid(
    config: SystemConfig,
    consts: LearningConstants,
    eps: float,
    model: ModelVariant = ModelVariant.NO_CS,
    bound_variant: BoundVariant = BoundVariant.BOUNDED_G,
) -> List[float]:
    """{eta_max, eta_max / 2, eta_max / 4} at the config's (p, m)."""
    eta_max = learning_rate_ceiling(config, consts, eps, model, bound_variant)
    return [eta_max, eta_max / 2.0, eta_max / 4.0]


def run_strategy_study(
    config: SystemConfig,
    task: FederatedTask,
    consts: LearningConstants,
    eps: float,
    threshold: float,
    rounds: int,
    seeds: Sequence[int] = tuple(range(10)),
    law: ServiceLaw = ServiceLaw(),
    strategies: Sequence[str] = STRATEGIES,
    eta_grid: Optional[Sequence[float]] = None,
    rho: float = 0.1,
    settings: Optional[Config] = None,
    m_range: Optional[Iterable[int]] = None,
    model: ModelVariant = ModelVariant.NO_CS,
    bound_variant: BoundVariant = BoundVariant.BOUNDED_G,
) -> Dict[str, StudyOutcome]:
    """
    Compare routing strategies on time, energy and updates to a loss threshold.

    Each strategy runs every seed at every learning rate of the grid; per
    metric, the learning rate with the best median is reported.

    Args:
        config: System configuration (its routing and m are replaced)
        task: Federated task with matching n
        consts: Learning constants used by the optimizers
        eps: Target accuracy of the bounds
        threshold: Loss threshold
        rounds: Updates per run
        seeds: Seeds of the runs
        law: Service-time law
        strategies: Strategy names
        eta_grid: Fixed learning rates; defaults to the per-strategy grid
        rho: Weight of the joint strategy
        settings: Optimizer settings
        m_range: Concurrency levels for the searching strategies
        model: Whether the CS queue is optimized for and simulated
        bound_variant: Guarantee used by the optimizers and the eta grid

    Returns:
        StudyOutcome per strategy
    """
    optimizer = RoutingOptimizer(settings)
    configs = strategy_configs(
        config,
        consts,
        eps,
        strategies,
        rho=rho,
        optimizer=optimizer,
        m_range=m_range,
        model=model,
        bound_variant=bound_variant,
    )
    outcomes = {}
    for name, chosen in configs.items():
        if eta_grid is not None:
            grid = list(eta_grid)
        else:
            grid = default_eta_grid(chosen, consts, eps, model, bound_variant)
        best = {"t": (math.inf, grid[0]), "energy": (math.inf, grid[0]), "k": (math.inf, grid[0])}
        for eta in grid:
            costs = {"t": [], "energy": [], "k": []}
            for seed in seeds:
                try:
                    trajectory = run_generalized_async_sgd(task, chosen, law, eta, rounds, seed=seed, model=model)
                except DivergenceError as e:
                    logger.warning("strategy %s diverged at eta=%.3g seed=%d: %s", name, eta, seed, e)
                    for column in costs:
                        costs[column].append(math.inf)
                    continue
                for column in costs:
                    costs[column].append(_first_crossing(trajectory, threshold, column))
            for column, values in costs.items():
                median = float(np.median(values))
                if median < best[column][0]:
                    best[column] = (median, eta)
        outcomes[name] = StudyOutcome(
            strategy=name,
            p=chosen.routing.p,
            m=chosen.m,
            eta=best["t"][1],
            median_time=best["t"][0],
            median_energy=best["energy"][0],
            median_rounds=best["k"][0],
        )
        logger.info("strategy %s: m=%d median time %.6g", name, chosen.m, best["t"][0])
    return outcomes
