"""Base service-time sampler interface."""

from abc import ABC, abstractmethod

import numpy as np

from ..exceptions import ConfigValidationError


class BaseServiceSampler(ABC):
    """Abstract base class for service-time samplers."""

    name = "base"

    @abstractmethod
    def sample(self, rng: np.random.Generator, rate: float) -> float:
        """
        Draw one service time with mean 1/rate.

        Args:
            rng: Random stream of the station being served
            rate: Service rate of the station

        Returns:
            A strictly positive service time
        """

    def sample_many(self, rng: np.random.Generator, rate: float, size: int) -> np.ndarray:
        """
        Draw several service times at once.

        Args:
            rng: Random stream
            rate: Service rate
            size: Number of draws

        Returns:
            Array of service times
        """
        return np.array([self.sample(rng, rate) for _ in range(size)])

    @staticmethod
    def check_rate(rate: float) -> None:
        if not rate > 0:
            raise ConfigValidationError(f"non-positive rate: {rate}")
