"""Factory for creating service-time samplers."""

from typing import Union

from ..models.simulation import LawKind, ServiceLaw
from .base_sampler import BaseServiceSampler
from .deterministic_sampler import DeterministicSampler
from .exponential_sampler import ExponentialSampler
from .lognormal_sampler import LognormalSampler


class SamplerFactory:
    """Factory for creating sampler instances."""

    SUPPORTED_SAMPLERS = {
        LawKind.EXPONENTIAL.value: ExponentialSampler,
        LawKind.DETERMINISTIC.value: DeterministicSampler,
        LawKind.LOGNORMAL.value: LognormalSampler,
    }

    @staticmethod
    def create_sampler(law: Union[ServiceLaw, LawKind, str]) -> BaseServiceSampler:
        """
        Create a sampler for a service law.

        Args:
            law: ServiceLaw, LawKind or law name ('exponential', 'deterministic', 'lognormal')

        Returns:
            Instance of the requested sampler

        Raises:
            ValueError: If the law name is not supported
        """
        sigma = 1.0
        if isinstance(law, ServiceLaw):
            sigma = law.lognormal_sigma
            name = law.kind.value
        elif isinstance(law, LawKind):
            name = law.value
        else:
            name = str(law).lower()

        if name not in SamplerFactory.SUPPORTED_SAMPLERS:
            supported = ", ".join(SamplerFactory.SUPPORTED_SAMPLERS.keys())
            raise ValueError(
                f"Unsupported service law: {name}. "
                f"Supported laws: {supported}"
            )

        sampler_class = SamplerFactory.SUPPORTED_SAMPLERS[name]
        if sampler_class is LognormalSampler:
            return sampler_class(sigma=sigma)
        return sampler_class()

    @staticmethod
    def get_supported_laws() -> list:
        """Get list of supported law names."""
        return list(SamplerFactory.SUPPORTED_SAMPLERS.keys())
