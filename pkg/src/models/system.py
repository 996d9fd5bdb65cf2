"""System description data models."""

from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..exceptions import ConfigValidationError


@dataclass(frozen=True)
class ClientProfile:
    """Service rates and phase power draws of one client."""

    mu_d: float
    mu_c: float
    mu_u: float
    p_d: float = 0.0
    p_c: float = 0.0
    p_u: float = 0.0

    @property
    def energy_per_task(self) -> float:
        """Expected energy of one task: compute, uplink and downlink phases."""
        return self.p_c / self.mu_c + self.p_u / self.mu_u + self.p_d / self.mu_d

    def to_dict(self) -> dict:
        """Convert to dictionary format."""
        return {
            "mu_d": self.mu_d,
            "mu_c": self.mu_c,
            "mu_u": self.mu_u,
            "p_d": self.p_d,
            "p_c": self.p_c,
            "p_u": self.p_u,
        }


@dataclass(frozen=True)
class RoutingVector:
    """Probability of sending the next task to each client."""

    p: Tuple[float, ...]

    def __len__(self) -> int:
        return len(self.p)

    def as_array(self) -> np.ndarray:
        """Return a fresh float array copy."""
        return np.asarray(self.p, dtype=float)

    @classmethod
    def from_array(cls, values: Sequence[float]) -> "RoutingVector":
        """Build from any sequence, renormalizing to the simplex."""
        arr = np.asarray(values, dtype=float)
        arr = arr / arr.sum()
        return cls(p=tuple(float(v) for v in arr))


@dataclass(frozen=True)
class CentralServer:
    """Service rate and power draw of the central server update queue."""

    mu_cs: float
    p_cs: float = 0.0

    def to_dict(self) -> dict:
        """Convert to dictionary format."""
        return {"mu_cs": self.mu_cs, "p_cs": self.p_cs}


@dataclass(frozen=True)
class SystemConfig:
    """Client roster, routing, concurrency and optional central-server queue."""

    clients: Tuple[ClientProfile, ...]
    routing: RoutingVector
    m: int
    cs: Optional[CentralServer] = None

    @property
    def n(self) -> int:
        return len(self.clients)

    def with_routing(self, p: Sequence[float]) -> "SystemConfig":
        """Copy with a new routing vector."""
        return replace(self, routing=RoutingVector.from_array(p))

    def with_concurrency(self, m: int) -> "SystemConfig":
        """Copy with a new concurrency level."""
        return replace(self, m=int(m))

    def without_cs(self) -> "SystemConfig":
        """Copy with the central-server queue removed."""
        return replace(self, cs=None)

    def to_dict(self) -> dict:
        """Convert to the JSON config schema."""
        return {
            "clients": [client.to_dict() for client in self.clients],
            "routing": list(self.routing.p),
            "m": self.m,
            "cs": self.cs.to_dict() if self.cs else None,
        }


@dataclass(frozen=True)
class LearningConstants:
    """Smoothness, noise and heterogeneity constants of the learning problem."""

    delta: float
    l_smooth: float
    sigma: float = 0.0
    m_dissim: float = 0.0
    g_bound: float = 0.0

    @property
    def b(self) -> float:
        return 6.0 * (self.sigma ** 2 + 2.0 * self.m_dissim ** 2)

    @property
    def c(self) -> float:
        return 6.0 * (self.sigma ** 2 + self.g_bound ** 2)

    def to_dict(self) -> dict:
        """Convert to dictionary format, derived constants included."""
        return {
            "delta": self.delta,
            "l_smooth": self.l_smooth,
            "sigma": self.sigma,
            "m_dissim": self.m_dissim,
            "g_bound": self.g_bound,
            "b": self.b,
            "c": self.c,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "LearningConstants":
        """Build from a dictionary, ignoring derived entries."""
        return cls(
            delta=float(data["delta"]),
            l_smooth=float(data["l_smooth"]),
            sigma=float(data.get("sigma", 0.0)),
            m_dissim=float(data.get("m_dissim", 0.0)),
            g_bound=float(data.get("g_bound", 0.0)),
        )


def uniform_routing(n: int) -> RoutingVector:
    """
    Uniform routing over n clients.

    Args:
        n: Number of clients

    Returns:
        RoutingVector with every entry 1/n

    Raises:
        ConfigValidationError: If n < 1
    """
    if n < 1:
        raise ConfigValidationError(f"uniform routing needs n >= 1, got {n}")
    p = np.full(n, 1.0 / n)
    return RoutingVector.from_array(p)


def rate_arrays(clients: Sequence[ClientProfile]) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return (mu_d, mu_c, mu_u) as float arrays."""
    mu_d = np.array([c.mu_d for c in clients], dtype=float)
    mu_c = np.array([c.mu_c for c in clients], dtype=float)
    mu_u = np.array([c.mu_u for c in clients], dtype=float)
    return mu_d, mu_c, mu_u


@dataclass
class ClientCluster:
    """A group of identical clients used to build scenarios."""

    name: str
    profile: ClientProfile
    count: int
    description: Optional[str] = None
    members: List[int] = field(default_factory=list)
