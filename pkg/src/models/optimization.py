"""Optimization data models."""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple

from ..exceptions import ConfigValidationError
from .network import BoundVariant, ModelVariant
from .system import LearningConstants, RoutingVector


class ObjectiveKind(str, Enum):
    """Scalar objectives over (p, m)."""

    MIN_ROUNDS = "min-rounds"
    MAX_THROUGHPUT = "max-throughput"
    MIN_TIME = "min-time"
    MIN_ENERGY = "min-energy"
    JOINT_TIME_ENERGY = "joint"


@dataclass(frozen=True)
class ObjectiveSpec:
    """
    What to optimize and under which constants.

    rho weighs normalized energy against normalized time and is only
    meaningful for JOINT_TIME_ENERGY, which also needs the normalizers
    tau_star and energy_star.
    """

    kind: ObjectiveKind
    eps: float
    consts: LearningConstants
    model: ModelVariant = ModelVariant.NO_CS
    bound_variant: BoundVariant = BoundVariant.BOUNDED_G
    rho: Optional[float] = None
    tau_star: Optional[float] = None
    energy_star: Optional[float] = None

    def __post_init__(self):
        if self.eps <= 0:
            raise ConfigValidationError(f"accuracy eps must be > 0, got {self.eps}")
        joint = self.kind is ObjectiveKind.JOINT_TIME_ENERGY
        if joint and self.rho is None:
            raise ConfigValidationError("joint objective requires rho")
        if not joint and self.rho is not None:
            raise ConfigValidationError(f"rho is only used by the joint objective, got kind {self.kind.value}")
        if joint and not 0.0 <= self.rho <= 1.0:
            raise ConfigValidationError(f"rho must lie in [0, 1], got {self.rho}")

    def to_dict(self) -> dict:
        """Convert to dictionary format."""
        return {
            "kind": self.kind.value,
            "eps": self.eps,
            "consts": self.consts.to_dict(),
            "model": self.model.value,
            "bound_variant": self.bound_variant.value,
            "rho": self.rho,
            "tau_star": self.tau_star,
            "energy_star": self.energy_star,
        }


@dataclass
class OptimizationResult:
    """Best routing and concurrency found, with the optimizer trace."""

    p_star: RoutingVector
    m_star: int
    objective_value: float
    trace: List[Tuple[int, float]] = field(default_factory=list)
    restarts_used: int = 0
    level_values: Dict[int, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        """Convert to dictionary format."""
        return {
            "p_star": list(self.p_star.p),
            "m_star": self.m_star,
            "objective_value": self.objective_value,
            "restarts_used": self.restarts_used,
            "level_values": {str(m): value for m, value in sorted(self.level_values.items())},
        }


@dataclass(frozen=True)
class ParetoPoint:
    """One scalarization weight and the operating point it selects."""

    rho: float
    p_star: RoutingVector
    m_star: int
    time_norm: float
    energy_norm: float

    def to_dict(self) -> dict:
        """Convert to dictionary format."""
        return {
            "rho": self.rho,
            "p_star": list(self.p_star.p),
            "m_star": self.m_star,
            "time_norm": self.time_norm,
            "energy_norm": self.energy_norm,
        }
