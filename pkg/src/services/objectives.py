"""Scalar objectives over routing and concurrency, with gradients in raw p."""

import math
from abc import ABC, abstractmethod
from typing import Optional, Tuple

import numpy as np

from ..exceptions import ConfigValidationError
from ..models.network import BoundVariant, ModelVariant, OperatingPoint
from ..models.optimization import ObjectiveKind, ObjectiveSpec
from ..models.system import SystemConfig
from ..network import (
    energy_per_round,
    energy_profile,
    operating_point,
    round_complexity,
    round_complexity_gradient,
    round_complexity_unbounded,
    round_complexity_unbounded_gradient,
)


class BaseObjective(ABC):
    """Abstract base class for routing objectives (lower is better)."""

    def __init__(self, config: SystemConfig, spec: ObjectiveSpec):
        """
        Initialize the objective.

        Args:
            config: System configuration (clients and optional CS)
            spec: Objective kind, accuracy and constants
        """
        self.config = config
        self.spec = spec
        self.mu_cs: Optional[float] = None
        if spec.model is ModelVariant.WITH_CS:
            if config.cs is None:
                raise ConfigValidationError("model 'cs' requires a 'cs' block in the config")
            self.mu_cs = config.cs.mu_cs
        self.energy = energy_profile(config, spec.model)

    def point(self, p: np.ndarray, m: int) -> OperatingPoint:
        return operating_point(self.config.clients, p, m, mu_cs=self.mu_cs)

    def rounds(self, p: np.ndarray, m: int, point: OperatingPoint) -> Tuple[float, np.ndarray]:
        """K_eps and its gradient under the configured bound."""
        spec = self.spec
        if spec.bound_variant is BoundVariant.UNBOUNDED_G:
            value = round_complexity_unbounded(p, m, point.delays, self.config.clients, spec.consts, spec.eps)
            grad = round_complexity_unbounded_gradient(
                p, m, point.delays, point.jacobian, self.config.clients, spec.consts, spec.eps
            )
        else:
            value = round_complexity(p, m, point.delays, spec.consts, spec.eps)
            grad = round_complexity_gradient(p, m, point.delays, point.jacobian, spec.consts, spec.eps)
        return value, grad

    def time_and_energy(self, p: np.ndarray, m: int) -> Tuple[float, float]:
        """Expected wall-clock time and energy to accuracy at (p, m)."""
        point = self.point(p, m)
        k_eps, _ = self.rounds(p, m, point)
        return k_eps / point.lam, k_eps * energy_per_round(p, self.energy)

    @abstractmethod
    def value_and_gradient(self, p: np.ndarray, m: int) -> Tuple[float, np.ndarray]:
        """
        Evaluate the objective and its gradient with respect to raw p.

        Args:
            p: Routing entries
            m: Concurrency

        Returns:
            Tuple of (value, gradient)
        """

    def value(self, p: np.ndarray, m: int) -> float:
        return self.value_and_gradient(p, m)[0]


class MinRoundsObjective(BaseObjective):
    """Round complexity K_eps."""

    def value_and_gradient(self, p, m):
        return self.rounds(p, m, self.point(p, m))


class MaxThroughputObjective(BaseObjective):
    """Negated throughput."""

    def value_and_gradient(self, p, m):
        point = self.point(p, m)
        return -point.lam, -point.lam_gradient


class MinTimeObjective(BaseObjective):
    """Expected time to accuracy, K_eps / lambda."""

    def value_and_gradient(self, p, m):
        point = self.point(p, m)
        k_eps, k_grad = self.rounds(p, m, point)
        lam = point.lam
        return k_eps / lam, k_grad / lam - k_eps * point.lam_gradient / lam ** 2


class MinEnergyObjective(BaseObjective):
    """Expected energy to accuracy, K_eps times the energy per round."""

    def value_and_gradient(self, p, m):
        point = self.point(p, m)
        k_eps, k_grad = self.rounds(p, m, point)
        per_round = energy_per_round(p, self.energy)
        return k_eps * per_round, k_grad * per_round + k_eps * self.energy.per_task_cost


class JointTimeEnergyObjective(BaseObjective):
    """rho * energy / energy_star + (1 - rho) * time / tau_star."""

    def __init__(self, config: SystemConfig, spec: ObjectiveSpec):
        super().__init__(config, spec)
        if spec.tau_star is None or spec.energy_star is None:
            raise ConfigValidationError("joint objective requires tau_star and energy_star")
        if spec.tau_star <= 0 or spec.energy_star <= 0:
            raise ConfigValidationError(
                f"normalizers must be > 0, got tau_star={spec.tau_star} energy_star={spec.energy_star}"
            )

    def value_and_gradient(self, p, m):
        spec = self.spec
        point = self.point(p, m)
        k_eps, k_grad = self.rounds(p, m, point)
        lam = point.lam
        tau = k_eps / lam
        tau_grad = k_grad / lam - k_eps * point.lam_gradient / lam ** 2
        per_round = energy_per_round(p, self.energy)
        energy = k_eps * per_round
        energy_grad = k_grad * per_round + k_eps * self.energy.per_task_cost
        rho = spec.rho
        value = rho * energy / spec.energy_star + (1.0 - rho) * tau / spec.tau_star
        grad = rho * energy_grad / spec.energy_star + (1.0 - rho) * tau_grad / spec.tau_star
        return value, grad


class ObjectiveFactory:
    """Factory for creating objective instances."""

    SUPPORTED_OBJECTIVES = {
        ObjectiveKind.MIN_ROUNDS: MinRoundsObjective,
        ObjectiveKind.MAX_THROUGHPUT: MaxThroughputObjective,
        ObjectiveKind.MIN_TIME: MinTimeObjective,
        ObjectiveKind.MIN_ENERGY: MinEnergyObjective,
        ObjectiveKind.JOINT_TIME_ENERGY: JointTimeEnergyObjective,
    }

    @staticmethod
    def create_objective(config: SystemConfig, spec: ObjectiveSpec) -> BaseObjective:
        """
        Create the objective named by spec.kind.

        Args:
            config: System configuration
            spec: Objective specification

        Returns:
            Objective instance

        Raises:
            ValueError: If the kind is not supported
        """
        objective_class = ObjectiveFactory.SUPPORTED_OBJECTIVES.get(spec.kind)
        if objective_class is None:
            supported = ", ".join(kind.value for kind in ObjectiveFactory.SUPPORTED_OBJECTIVES)
            raise ValueError(f"Unsupported objective: {spec.kind}. Supported objectives: {supported}")
        return objective_class(config, spec)


def is_finite(value: float) -> bool:
    return value is not None and math.isfinite(value)
