"""Service-time sampler implementations."""

from .base_sampler import BaseServiceSampler
from .deterministic_sampler import DeterministicSampler
from .exponential_sampler import ExponentialSampler
from .lognormal_sampler import LognormalSampler
from .sampler_factory import SamplerFactory

__all__ = [
    "BaseServiceSampler",
    "DeterministicSampler",
    "ExponentialSampler",
    "LognormalSampler",
    "SamplerFactory",
]
