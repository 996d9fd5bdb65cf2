"""Exponential service times."""

import numpy as np

from .base_sampler import BaseServiceSampler


class ExponentialSampler(BaseServiceSampler):
    """Memoryless service, the law under which the closed forms hold."""

    name = "exponential"

    def sample(self, rng: np.random.Generator, rate: float) -> float:
        self.check_rate(rate)
        return float(rng.exponential(1.0 / rate))

    def sample_many(self, rng: np.random.Generator, rate: float, size: int) -> np.ndarray:
        self.check_rate(rate)
        return rng.exponential(1.0 / rate, size=size)
