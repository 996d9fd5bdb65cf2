"""End-to-end oracle suites for the closed forms."""

import logging
from typing import Callable, List, Optional, Tuple

import numpy as np

from ..config import Config
from ..exceptions import OracleFailure
from ..models.network import ModelVariant
from ..models.optimization import ObjectiveKind, ObjectiveSpec
from ..models.system import ClientProfile, LearningConstants, SystemConfig, uniform_routing
from ..models.validation import SuiteResult
from ..network import (
    brute_force_constant,
    build_table,
    energy_optimal_routing,
    energy_profile,
    minimal_energy,
    operating_point,
)
from .optimization_service import RoutingOptimizer

logger = logging.getLogger(__name__)

FD_STEP = 1e-6
CS_LIMIT_RATE = 1e6

Instance = Tuple[Tuple[ClientProfile, ...], np.ndarray, int, Optional[float]]


def relative_error(approx: np.ndarray, exact: np.ndarray, floor: float = 1e-8) -> float:
    """Largest entrywise |approx - exact| / (|exact| + floor * scale)."""
    approx = np.atleast_1d(np.asarray(approx, dtype=float))
    exact = np.atleast_1d(np.asarray(exact, dtype=float))
    scale = max(1.0, float(np.max(np.abs(exact))))
    return float(np.max(np.abs(approx - exact) / (np.abs(exact) + floor * scale)))


def random_instance(
    rng: np.random.Generator,
    n_max: int = 3,
    m_max: int = 5,
    m_min: int = 1,
    with_cs: bool = False,
    n: Optional[int] = None,
) -> Instance:
    """Rates uniform in [0.1, 10] and an interior Dirichlet routing."""
    n = n or int(rng.integers(1, n_max + 1))
    clients = tuple(
        ClientProfile(mu_d=float(d), mu_c=float(c), mu_u=float(u))
        for d, c, u in rng.uniform(0.1, 10.0, size=(n, 3))
    )
    p = rng.dirichlet(np.full(n, 2.0))
    m = int(rng.integers(m_min, m_max + 1))
    mu_cs = float(rng.uniform(0.1, 10.0)) if with_cs else None
    return clients, p, m, mu_cs


def _central_difference(func: Callable[[np.ndarray], np.ndarray], p: np.ndarray, step: float = FD_STEP) -> np.ndarray:
    columns = []
    for j in range(len(p)):
        up, down = p.copy(), p.copy()
        up[j] += step
        down[j] -= step
        columns.append((np.asarray(func(up)) - np.asarray(func(down))) / (2.0 * step))
    return np.stack(columns, axis=-1)


class _Tracker:
    """Keeps the check with the largest error relative to its tolerance."""

    def __init__(self, name: str):
        self.name = name
        self.checks = 0
        self.error = 0.0
        self.tolerance = 1.0

    def add(self, error: float, tolerance: float) -> None:
        self.checks += 1
        if not np.isfinite(error) or error / tolerance > self.error / self.tolerance:
            self.error, self.tolerance = float(error), tolerance

    def result(self) -> SuiteResult:
        return SuiteResult(self.name, self.checks, self.error, self.tolerance)


class ValidationService:
    """Runs the oracle suites on seeded random instances."""

    def __init__(self, settings: Optional[Config] = None, seed: Optional[int] = None):
        self.settings = settings or Config()
        self.seed = self.settings.seed if seed is None else seed

    def _rng(self, suite: int) -> np.random.Generator:
        return np.random.default_rng(np.random.SeedSequence(self.seed, spawn_key=(suite,)))

    def check_normalization(self, instances: int = 50) -> SuiteResult:
        """Buzen recursion against brute-force enumeration, both variants."""
        rng = self._rng(0)
        tracker = _Tracker("normalization")
        for index in range(instances):
            clients, p, m, mu_cs = random_instance(rng, with_cs=bool(index % 2))
            table = build_table(clients, p, m, mu_cs=mu_cs)
            for k in range(m + 1):
                exact = brute_force_constant(clients, p, k, mu_cs=mu_cs, state_cap=self.settings.state_cap)
                tracker.add(abs(table.constant(k) - exact) / exact, 1e-10)
        return tracker.result()

    def check_conservation(self, instances: int = 100, m_max: int = 50) -> SuiteResult:
        """Expected delays sum to m - 1 for both variants."""
        rng = self._rng(1)
        tracker = _Tracker("conservation")
        for with_cs in (False, True):
            for _ in range(instances):
                clients, p, m, mu_cs = random_instance(rng, n_max=5, m_max=m_max, with_cs=with_cs)
                delays = operating_point(clients, p, m, mu_cs=mu_cs).delays
                tracker.add(abs(float(delays.sum()) - (m - 1)), 1e-9)
        return tracker.result()

    def check_delay_jacobian(self, instances: int = 20) -> SuiteResult:
        """Analytic delay Jacobians against central finite differences."""
        rng = self._rng(2)
        tracker = _Tracker("delay-jacobian")
        for index in range(instances):
            clients, p, m, mu_cs = random_instance(rng, m_min=2, m_max=6, with_cs=bool(index % 2), n=3)
            analytic = operating_point(clients, p, m, mu_cs=mu_cs).jacobian
            numeric = _central_difference(lambda q: operating_point(clients, q, m, mu_cs=mu_cs).delays, p)
            tracker.add(relative_error(numeric, analytic, floor=1e-6), 1e-5)
        return tracker.result()

    def check_throughput_gradient(self, instances: int = 20) -> SuiteResult:
        """
        Throughput gradient against finite differences, plus the homogeneity
        identity sum_j p_j dlambda/dp_j = -lambda.
        """
        rng = self._rng(3)
        tracker = _Tracker("throughput-gradient")
        for index in range(instances):
            clients, p, m, mu_cs = random_instance(rng, m_max=6, with_cs=bool(index % 2), n=3)
            point = operating_point(clients, p, m, mu_cs=mu_cs)
            numeric = _central_difference(lambda q: np.array([operating_point(clients, q, m, mu_cs=mu_cs).lam]), p)
            tracker.add(relative_error(numeric[0], point.lam_gradient, floor=1e-6), 1e-5)
            tracker.add(abs(float(p @ point.lam_gradient) + point.lam), 1e-8)
        return tracker.result()

    def check_cs_limit(self, instances: int = 20) -> SuiteResult:
        """A near-instant central server reproduces the model without it."""
        rng = self._rng(4)
        tracker = _Tracker("cs-limit")
        for _ in range(instances):
            clients, p, m, _ = random_instance(rng, m_min=2, m_max=8)
            plain = operating_point(clients, p, m)
            limit = operating_point(clients, p, m, mu_cs=CS_LIMIT_RATE)
            tracker.add(relative_error(limit.delays, plain.delays), 1e-4)
            tracker.add(relative_error(limit.lam, plain.lam), 1e-4)
        return tracker.result()

    def check_energy_optimum(self, instances: int = 10) -> SuiteResult:
        """MinEnergy at m = 1 recovers p proportional to 1 / sqrt(energy per task)."""
        rng = self._rng(5)
        optimizer = RoutingOptimizer(self.settings, seed=self.seed)
        consts = LearningConstants(delta=1.0, l_smooth=1.0)
        spec = ObjectiveSpec(kind=ObjectiveKind.MIN_ENERGY, eps=1.0, consts=consts)
        tracker = _Tracker("energy-optimum")
        for _ in range(instances):
            n = int(rng.integers(2, 4))
            clients = tuple(
                ClientProfile(mu_d=1.0, mu_c=1.0, mu_u=1.0, p_c=float(e)) for e in rng.uniform(0.5, 10.0, n)
            )
            config = SystemConfig(clients=clients, routing=uniform_routing(n), m=1)
            result = optimizer.optimize_routing(config, spec, 1, restarts=1)
            energy = energy_profile(config, ModelVariant.NO_CS)
            closed = energy_optimal_routing(energy).as_array()
            tracker.add(float(np.max(np.abs(result.p_star.as_array() - closed))), 1e-3)
            tracker.add(relative_error(result.objective_value, minimal_energy(energy, consts, 1.0)), 1e-6)
        return tracker.result()

    def run_all(self) -> List[SuiteResult]:
        """
        Run every suite.

        Returns:
            Results in suite order

        Raises:
            OracleFailure: If any suite exceeds its tolerance
        """
        suites = [
            self.check_normalization,
            self.check_conservation,
            self.check_delay_jacobian,
            self.check_throughput_gradient,
            self.check_cs_limit,
            self.check_energy_optimum,
        ]
        results = []
        for suite in suites:
            result = suite()
            logger.info("suite %s: %d checks, max error %.3g", result.name, result.checks, result.max_error)
            results.append(result)
        failed = [result for result in results if not result.passed]
        if failed:
            details = ", ".join(f"{r.name} (error {r.max_error:.3g} > {r.tolerance:.0e})" for r in failed)
            raise OracleFailure(f"oracle suites failed: {details}")
        return results
