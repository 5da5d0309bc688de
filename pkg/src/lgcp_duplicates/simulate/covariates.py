"""Mean structures m(s) evaluated on the simulation grid."""

import logging
import math
from typing import List

import numpy as np
import shapely
from scipy.spatial.distance import cdist
from shapely.geometry import LineString

from lgcp_duplicates.errors import ConfigError
from lgcp_duplicates.geometry import Window
from lgcp_duplicates.models import (
    AnchorDistanceCovariate,
    ConstantMean,
    CoordinateLinearMean,
    CovariateLinearMean,
    CovariateSpec,
    MeanModel,
    RasterFileCovariate,
    SegmentDistanceCovariate,
)

from .raster import RasterField

logger = logging.getLogger(__name__)


def covariate_raster(covariate: CovariateSpec, window: Window, nx: int, ny: int) -> RasterField:
    """Evaluate a covariate surface at the cell centres of the simulation grid."""
    grid = RasterField(window=window, values=np.zeros((ny, nx)))
    X, Y = grid.centers()
    centres = np.column_stack([X.ravel(), Y.ravel()])

    if isinstance(covariate, AnchorDistanceCovariate):
        rng = np.random.default_rng(covariate.seed)
        x0, x1, y0, y1 = window.bounds
        anchors = np.column_stack(
            [rng.uniform(x0, x1, covariate.n_anchors), rng.uniform(y0, y1, covariate.n_anchors)]
        )
        values = np.log1p(cdist(centres, anchors).min(axis=1))
    elif isinstance(covariate, SegmentDistanceCovariate):
        segment = LineString([covariate.start, covariate.end])
        values = np.log1p(shapely.distance(segment, shapely.points(centres)))
    elif isinstance(covariate, RasterFileCovariate):
        loaded = RasterField.from_csv(covariate.path)
        if (loaded.nx, loaded.ny) != (nx, ny) or loaded.window.bounds != window.bounds:
            raise ConfigError(
                f"Covariate raster {covariate.path} is {loaded.nx}x{loaded.ny} over "
                f"{loaded.window.describe()}, simulation grid is {nx}x{ny} over {window.describe()}"
            )
        return loaded
    else:
        raise ConfigError(f"Unknown covariate kind: {getattr(covariate, 'kind', covariate)!r}")

    return grid.with_values(np.asarray(values, dtype=float).reshape(ny, nx))


def resolve_mean(mean: MeanModel, window: Window, nx: int, ny: int) -> RasterField:
    """Evaluate a mean model on the grid.

    Covariate-linear models with ``expected_count`` get their intercept replaced so that
    the grid integral of exp(m) equals ``expected_count``.
    """
    template = RasterField(window=window, values=np.zeros((ny, nx)))
    if isinstance(mean, ConstantMean):
        return template.with_values(np.full((ny, nx), mean.value))

    X, Y = template.centers()
    if isinstance(mean, CoordinateLinearMean):
        return template.with_values(mean.intercept + mean.coef_x * X + mean.coef_y * Y)

    if isinstance(mean, CovariateLinearMean):
        layers: List[RasterField] = [covariate_raster(c, window, nx, ny) for c in mean.covariates]
        linear = np.zeros((ny, nx))
        for beta, layer in zip(mean.coefficients, layers):
            linear = linear + beta * layer.values
        intercept = mean.intercept
        if mean.expected_count is not None:
            mass = template.with_values(np.exp(linear - linear.max())).integral()
            intercept = math.log(mean.expected_count) - math.log(mass) - float(linear.max())
            logger.info(
                f"Calibrated covariate intercept to {intercept:.6g} "
                f"for expected count {mean.expected_count:g}"
            )
        return template.with_values(intercept + linear)

    raise ConfigError(f"Unknown mean model: {mean!r}")
