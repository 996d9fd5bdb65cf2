"""Data models for the queueing model of asynchronous federated learning."""

from .learning import FederatedTask, StudyOutcome, Trajectory, TrajectoryRecord
from .manifest import RunManifest
from .network import (
    BoundVariant,
    CoefficientTable,
    ComplexityReport,
    DelayReport,
    EnergyProfile,
    ModelVariant,
    NormalizationTable,
    OperatingPoint,
)
from .optimization import ObjectiveKind, ObjectiveSpec, OptimizationResult, ParetoPoint
from .simulation import EventTrace, LawKind, ServiceLaw, SimHorizon, SimStats, StationKind
from .system import (
    CentralServer,
    ClientCluster,
    ClientProfile,
    LearningConstants,
    RoutingVector,
    SystemConfig,
    uniform_routing,
)
from .validation import SuiteResult

__all__ = [
    "BoundVariant",
    "CentralServer",
    "ClientCluster",
    "ClientProfile",
    "CoefficientTable",
    "ComplexityReport",
    "DelayReport",
    "EnergyProfile",
    "EventTrace",
    "FederatedTask",
    "LawKind",
    "LearningConstants",
    "ModelVariant",
    "NormalizationTable",
    "ObjectiveKind",
    "ObjectiveSpec",
    "OperatingPoint",
    "OptimizationResult",
    "ParetoPoint",
    "RoutingVector",
    "RunManifest",
    "ServiceLaw",
    "SimHorizon",
    "SimStats",
    "StationKind",
    "StudyOutcome",
    "SuiteResult",
    "SystemConfig",
    "Trajectory",
    "TrajectoryRecord",
    "uniform_routing",
]
