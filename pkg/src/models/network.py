"""Result models of the closed-form network analysis."""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np


class ModelVariant(str, Enum):
    """Whether the central-server update queue is modeled."""

    NO_CS = "nocs"
    WITH_CS = "cs"


class BoundVariant(str, Enum):
    """Which round-complexity bound is used."""

    BOUNDED_G = "bounded"
    UNBOUNDED_G = "unbounded"


@dataclass(frozen=True)
class NormalizationTable:
    """
    Normalization constants for populations 0..m.

    Each level carries its own exponent: the constant of population k is
    values[k] * exp(exponents[k]) with values[k] in [1, e). values[0] is 1
    and exponents[0] is 0.

    log_scale is the log of the largest single-server load. Ratios tilted
    by it (see scaled_ratios) are tail probabilities of that station and
    never exceed 1.
    """

    values: np.ndarray
    exponents: np.ndarray
    log_scale: float
    variant: ModelVariant = ModelVariant.NO_CS

    @property
    def population(self) -> int:
        return len(self.values) - 1

    def constant(self, k: int) -> float:
        """Z (or W) at population k; zero for negative k."""
        if k < 0:
            return 0.0
        return float(self.values[k]) * math.exp(self.exponents[k])

    def log_constant(self, k: int) -> float:
        """Natural log of the constant at population k."""
        return math.log(self.values[k]) + float(self.exponents[k])

    def log_ratios(self, k: int) -> np.ndarray:
        """log(constant(k - j) / constant(k)) for j = 0..k."""
        mantissas = np.log(self.values[k::-1] / self.values[k])
        return mantissas + (self.exponents[k::-1] - self.exponents[k])

    def ratio(self, j: int, k: int) -> float:
        """Constant at population k - j divided by the constant at population k."""
        if k - j < 0:
            return 0.0
        mantissa = float(self.values[k - j] / self.values[k])
        return mantissa * math.exp(self.exponents[k - j] - self.exponents[k])

    def scaled_ratios(self, k: int) -> np.ndarray:
        """
        Ratios tilted by the largest single-server load, for j = 0..k.

        Entry j is ratio(j, k) * exp(j * log_scale). Use loads divided by
        exp(log_scale) alongside them to recover true products.
        """
        return np.exp(self.log_ratios(k) + np.arange(k + 1) * self.log_scale)

    def to_dict(self) -> dict:
        """Convert to dictionary format."""
        return {
            "values": [float(v) for v in self.values],
            "exponents": [float(e) for e in self.exponents],
            "log_scale": self.log_scale,
            "variant": self.variant.value,
        }


@dataclass(frozen=True)
class CoefficientTable:
    """
    Coefficients of the first and second moments of per-client task counts.

    All quantities are evaluated at population m - 1 (the state seen right
    after an update). CS entries are zero for the model without the
    central-server queue.
    """

    gamma: np.ndarray
    beta1: np.ndarray
    beta2: np.ndarray
    alpha: np.ndarray
    psi: np.ndarray
    ratio1: float
    ratio2: float
    cs_share: Optional[np.ndarray] = None
    beta_cs1: float = 0.0
    beta_cs2: float = 0.0
    alpha_cs_row: Optional[np.ndarray] = None
    alpha_cs_pair: Optional[np.ndarray] = None

    def first_moments(self) -> np.ndarray:
        """E[S_i]: expected number of client-i tasks anywhere in the network."""
        moments = self.beta1 + self.gamma * self.ratio1
        if self.cs_share is not None:
            moments = moments + self.cs_share * self.beta_cs1
        return moments

    def second_moments(self) -> np.ndarray:
        """E[S_i S_j] for every client pair."""
        moments = (
            self.alpha
            + np.outer(self.beta2, self.gamma)
            + np.outer(self.gamma, self.beta2)
            + self.psi
        )
        if self.cs_share is not None:
            q = self.cs_share
            moments = (
                moments
                + self.alpha_cs_pair
                + self.beta_cs2 * (np.outer(q, self.gamma) + np.outer(self.gamma, q))
                + np.outer(q, self.alpha_cs_row)
                + np.outer(self.alpha_cs_row, q)
            )
        return moments

    def covariance(self) -> np.ndarray:
        """Cov(S_i, S_j)."""
        first = self.first_moments()
        return self.second_moments() - np.outer(first, first)


@dataclass(frozen=True)
class DelayReport:
    """Expected relative delays and their Jacobian with respect to routing."""

    delays: np.ndarray
    jacobian: np.ndarray
    model: ModelVariant = ModelVariant.NO_CS

    def to_dict(self) -> dict:
        """Convert to dictionary format."""
        return {
            "delays": self.delays.tolist(),
            "jacobian": self.jacobian.tolist(),
            "model": self.model.value,
        }


@dataclass(frozen=True)
class OperatingPoint:
    """Everything the closed forms give at one (p, m), from a single table."""

    table: NormalizationTable
    delays: np.ndarray
    jacobian: np.ndarray
    lam: float
    lam_gradient: np.ndarray
    m: int

    @property
    def model(self) -> ModelVariant:
        return self.table.variant


@dataclass(frozen=True)
class EnergyProfile:
    """Expected energy per task at each client, plus the CS cost per update."""

    per_task_cost: np.ndarray
    cs_cost: float = 0.0


@dataclass(frozen=True)
class ComplexityReport:
    """Round, time and energy complexity at one operating point."""

    k_eps: float
    eta_max: float
    tau_eps: float
    e_eps: float
    energy_per_round: float
    lam: float
    model: ModelVariant = ModelVariant.NO_CS
    bound_variant: BoundVariant = BoundVariant.BOUNDED_G

    @property
    def rounds(self) -> int:
        """Round count rounded up."""
        return int(math.ceil(self.k_eps))

    def to_dict(self) -> dict:
        """Convert to dictionary format."""
        return {
            "k_eps": self.k_eps,
            "k_eps_ceil": self.rounds,
            "eta_max": self.eta_max,
            "tau_eps": self.tau_eps,
            "e_eps": self.e_eps,
            "energy_per_round": self.energy_per_round,
            "lambda": self.lam,
            "model": self.model.value,
            "bound_variant": self.bound_variant.value,
        }
