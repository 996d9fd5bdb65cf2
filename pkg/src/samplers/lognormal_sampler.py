"""Lognormal service times."""

import math

import numpy as np

from .base_sampler import BaseServiceSampler


class LognormalSampler(BaseServiceSampler):
    """Heavy-tailed service with mean 1/rate."""

    name = "lognormal"

    def __init__(self, sigma: float = 1.0):
        """
        Initialize the sampler.

        Args:
            sigma: Standard deviation of the underlying normal (default: 1)
        """
        self.sigma = sigma

    def _mu(self, rate: float) -> float:
        # E[exp(N(mu, sigma^2))] = exp(mu + sigma^2 / 2) = 1 / rate
        return math.log(1.0 / rate) - 0.5 * self.sigma ** 2

    def sample(self, rng: np.random.Generator, rate: float) -> float:
        self.check_rate(rate)
        return float(rng.lognormal(self._mu(rate), self.sigma))

    def sample_many(self, rng: np.random.Generator, rate: float, size: int) -> np.ndarray:
        self.check_rate(rate)
        return rng.lognormal(self._mu(rate), self.sigma, size=size)
