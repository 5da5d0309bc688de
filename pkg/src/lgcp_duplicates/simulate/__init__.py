"""Random fields, LGCP patterns, theoretical K and snapping corruption."""

from .corruption import CorruptionSpec, corrupt, snapped_count
from .covariates import covariate_raster, resolve_mean
from .grf import SeedLike, as_generator, exponential_covariance, simulate_grf
from .lgcp import (
    LGCPRealization,
    realize_lgcp,
    sample_poisson_raster,
    simulate_lgcp,
    theoretical_k,
    theoretical_k_curve,
)
from .raster import RasterField

__all__ = [
    "CorruptionSpec",
    "LGCPRealization",
    "RasterField",
    "SeedLike",
    "as_generator",
    "corrupt",
    "covariate_raster",
    "exponential_covariance",
    "realize_lgcp",
    "resolve_mean",
    "sample_poisson_raster",
    "simulate_grf",
    "simulate_lgcp",
    "snapped_count",
    "theoretical_k",
    "theoretical_k_curve",
]
