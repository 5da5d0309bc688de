"""Models package."""

from .scenario import (
    ALL_METHODS,
    CorruptionConfig,
    BandwidthConfig,
    QuantileBand,
    ScenarioConfig,
    StudySummary,
    SummaryRow,
)
from .schemas import (
    AnchorDistanceCovariate,
    ConstantMean,
    ContrastConfig,
    CoordinateLinearMean,
    CovariateLinearMean,
    CovarianceParams,
    CovariateSpec,
    FitDiagnostics,
    FitResult,
    MeanModel,
    MethodLabel,
    OptimizerSpec,
    ParameterBounds,
    RasterFileCovariate,
    SegmentDistanceCovariate,
)

__all__ = [
    "ALL_METHODS",
    "CorruptionConfig",
    "BandwidthConfig",
    "QuantileBand",
    "ScenarioConfig",
    "StudySummary",
    "SummaryRow",
    "AnchorDistanceCovariate",
    "ConstantMean",
    "ContrastConfig",
    "CoordinateLinearMean",
    "CovariateLinearMean",
    "CovarianceParams",
    "CovariateSpec",
    "FitDiagnostics",
    "FitResult",
    "MeanModel",
    "MethodLabel",
    "OptimizerSpec",
    "ParameterBounds",
    "RasterFileCovariate",
    "SegmentDistanceCovariate",
]
