"""Domain models package."""

from src.domain.errors import BirkhoffError
from src.domain.models import (
    BirkhoffState,
    ComparisonReport,
    DivergenceSample,
    EigenBackend,
    FlowMethod,
    FlowSpec,
    FrequencyVector,
    GenFunValue,
    HardyField,
    IllposedParams,
    LaxMatrix,
    LaxSpectrum,
    NormTrackReport,
    RealField,
    RecurrenceReport,
    SobolevIndex,
    StabilityReport,
    Trajectory,
    TrajectoryDiagnostics,
    TransferMatrix,
    UkConstruction,
    WindowedIntegral,
    XiSeries,
)

__all__ = [
    "BirkhoffError",
    "RealField",
    "HardyField",
    "SobolevIndex",
    "LaxMatrix",
    "LaxSpectrum",
    "GenFunValue",
    "EigenBackend",
    "BirkhoffState",
    "FrequencyVector",
    "TransferMatrix",
    "FlowMethod",
    "FlowSpec",
    "Trajectory",
    "TrajectoryDiagnostics",
    "ComparisonReport",
    "IllposedParams",
    "UkConstruction",
    "XiSeries",
    "WindowedIntegral",
    "DivergenceSample",
    "StabilityReport",
    "RecurrenceReport",
    "NormTrackReport",
]
