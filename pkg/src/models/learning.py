"""Learning-task and trajectory data models."""

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np


@dataclass
class FederatedTask:
    """
    Heterogeneous least-squares problem split across n clients.

    Client i holds f_i(w) = 0.5 * ||A_i w - b_i||^2 / rows_i + 0.5 * ridge * ||w||^2
    and the global objective is the plain average of the f_i.
    """

    designs: List[np.ndarray]
    targets: List[np.ndarray]
    w0: np.ndarray
    noise_sigma: float = 0.0
    heterogeneity: float = 0.0
    ridge: float = 0.0
    seed: Optional[int] = None

    @property
    def n(self) -> int:
        return len(self.designs)

    @property
    def dim(self) -> int:
        return self.designs[0].shape[1]

    def client_loss(self, i: int, w: np.ndarray) -> float:
        design = self.designs[i]
        residual = design @ w - self.targets[i]
        return float(0.5 * residual @ residual / design.shape[0] + 0.5 * self.ridge * w @ w)

    def client_gradient(self, i: int, w: np.ndarray) -> np.ndarray:
        design = self.designs[i]
        return design.T @ (design @ w - self.targets[i]) / design.shape[0] + self.ridge * w

    def loss(self, w: np.ndarray) -> float:
        return float(np.mean([self.client_loss(i, w) for i in range(self.n)]))

    def gradient(self, w: np.ndarray) -> np.ndarray:
        return np.mean([self.client_gradient(i, w) for i in range(self.n)], axis=0)

    def client_gradients(self, w: np.ndarray) -> np.ndarray:
        """Stacked per-client gradients, shape (n, dim)."""
        return np.stack([self.client_gradient(i, w) for i in range(self.n)])

    def hessian(self) -> np.ndarray:
        """Hessian of the global objective (constant for quadratics)."""
        blocks = [design.T @ design / design.shape[0] for design in self.designs]
        return np.mean(blocks, axis=0) + self.ridge * np.eye(self.dim)

    def minimizer(self) -> np.ndarray:
        """Unique minimizer of the global objective."""
        rhs = np.mean(
            [design.T @ target / design.shape[0] for design, target in zip(self.designs, self.targets)],
            axis=0,
        )
        return np.linalg.solve(self.hessian(), rhs)

    def optimal_loss(self) -> float:
        return self.loss(self.minimizer())


@dataclass(frozen=True)
class TrajectoryRecord:
    """State right after update k."""

    k: int
    t: float
    energy: float
    loss: float
    grad_norm_sq: float
    client: int
    staleness: int

    def to_row(self) -> tuple:
        return (self.k, self.t, self.energy, self.loss, self.grad_norm_sq, self.client, self.staleness)


@dataclass
class Trajectory:
    """Updates of one Generalized AsyncSGD run in application order."""

    records: List[TrajectoryRecord] = field(default_factory=list)
    eta: float = 0.0
    seed: int = 0
    final_w: Optional[np.ndarray] = None

    COLUMNS = ("k", "t", "energy", "loss", "grad_norm_sq", "client", "staleness")

    def __len__(self) -> int:
        return len(self.records)

    def column(self, name: str) -> np.ndarray:
        """One column of the records as an array."""
        return np.array([getattr(record, name) for record in self.records])

    def mean_grad_norm_sq(self) -> float:
        """Average squared gradient norm over the recorded updates."""
        if not self.records:
            return float("nan")
        return float(self.column("grad_norm_sq").mean())

    def to_rows(self) -> list:
        return [record.to_row() for record in self.records]


@dataclass(frozen=True)
class StudyOutcome:
    """Median costs to a loss threshold for one routing strategy."""

    strategy: str
    p: tuple
    m: int
    eta: float
    median_time: float
    median_energy: float
    median_rounds: float

    def to_dict(self) -> dict:
        """Convert to dictionary format."""
        return {
            "strategy": self.strategy,
            "p": list(self.p),
            "m": self.m,
            "eta": self.eta,
            "median_time": self.median_time,
            "median_energy": self.median_energy,
            "median_rounds": self.median_rounds,
        }
