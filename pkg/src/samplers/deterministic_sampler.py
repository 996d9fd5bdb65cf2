"""Deterministic service times."""

import numpy as np

from .base_sampler import BaseServiceSampler


class DeterministicSampler(BaseServiceSampler):
    """Every service lasts exactly 1/rate; the stream is never consumed."""

    name = "deterministic"

    def sample(self, rng: np.random.Generator, rate: float) -> float:
        self.check_rate(rate)
        return 1.0 / rate

    def sample_many(self, rng: np.random.Generator, rate: float, size: int) -> np.ndarray:
        self.check_rate(rate)
        return np.full(size, 1.0 / rate)
