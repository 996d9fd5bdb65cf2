"""Closed-form analysis of the closed queueing network."""

from .analysis import (
    coefficient_table,
    delay_jacobian,
    delay_jacobian_cs,
    delay_report,
    expected_delays,
    expected_delays_cs,
    operating_point,
    staleness_impact,
    throughput,
    throughput_cs,
    throughput_gradient,
    throughput_gradient_cs,
)
from .buzen import (
    brute_force_constant,
    build_table,
    normalization_constants,
    normalization_constants_with_cs,
)
from .complexity import (
    complexity_report,
    energy_optimal_routing,
    energy_per_round,
    energy_profile,
    expected_energy,
    expected_time,
    max_learning_rate,
    max_learning_rate_unbounded,
    minimal_energy,
    round_complexity,
    round_complexity_gradient,
    round_complexity_unbounded,
    round_complexity_unbounded_gradient,
    system_staleness,
)

__all__ = [
    "brute_force_constant",
    "build_table",
    "coefficient_table",
    "complexity_report",
    "delay_jacobian",
    "delay_jacobian_cs",
    "delay_report",
    "energy_optimal_routing",
    "energy_per_round",
    "energy_profile",
    "expected_delays",
    "expected_delays_cs",
    "expected_energy",
    "expected_time",
    "max_learning_rate",
    "max_learning_rate_unbounded",
    "minimal_energy",
    "normalization_constants",
    "normalization_constants_with_cs",
    "operating_point",
    "round_complexity",
    "round_complexity_gradient",
    "round_complexity_unbounded",
    "round_complexity_unbounded_gradient",
    "staleness_impact",
    "system_staleness",
    "throughput",
    "throughput_cs",
    "throughput_gradient",
    "throughput_gradient_cs",
]
