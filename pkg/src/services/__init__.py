"""Service layer: objectives, optimization, simulation runs, learning and validation."""

from .learning_service import (
    estimate_constants,
    learning_rate_ceiling,
    make_synthetic_task,
    run_generalized_async_sgd,
    run_strategy_study,
)
from .objectives import ObjectiveFactory
from .optimization_service import RoutingOptimizer, optimize_routing, pareto_sweep, search_concurrency
from .simulation_service import confidence_intervals, measure_energy, run_simulation
from .validation_service import ValidationService

__all__ = [
    "ObjectiveFactory",
    "RoutingOptimizer",
    "ValidationService",
    "confidence_intervals",
    "estimate_constants",
    "learning_rate_ceiling",
    "make_synthetic_task",
    "measure_energy",
    "optimize_routing",
    "pareto_sweep",
    "run_generalized_async_sgd",
    "run_simulation",
    "run_strategy_study",
    "search_concurrency",
]
