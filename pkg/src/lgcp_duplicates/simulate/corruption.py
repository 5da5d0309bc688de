"""Snapping corruption: relocate a random share of points to their cell's snap point."""

import logging
import math

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from lgcp_duplicates.errors import ConfigError
from lgcp_duplicates.geometry import Partition, PointPattern, locate_many

logger = logging.getLogger(__name__)


class CorruptionSpec(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    partition: Partition
    fraction: float = Field(..., ge=0.0, le=1.0)
    seed: int


def snapped_count(fraction: float, n: int) -> int:
    """floor(fraction * n), tolerant of representation error (0.6 * 1000 is 599.999...)."""
    return min(n, int(math.floor(fraction * n + 1e-9)))


def corrupt(pattern: PointPattern, request: CorruptionSpec) -> PointPattern:
    """Snap floor(fraction * N) points, chosen uniformly without replacement, to cell snap points.

    The output keeps the input order and size; untouched points are unchanged.
    """
    partition = request.partition
    if not pattern.window.polygon.equals(partition.window.polygon):
        raise ConfigError(
            f"Pattern window {pattern.window.describe()} differs from partition window "
            f"{partition.window.describe()}"
        )
    k = snapped_count(request.fraction, pattern.n)
    if k == 0:
        return pattern

    rng = np.random.default_rng(request.seed)
    chosen = rng.permutation(pattern.n)[:k]
    points = np.array(pattern.points, copy=True)
    cells = locate_many(partition, points[chosen])
    points[chosen] = partition.snap_points[cells]
    logger.debug(
        f"Snapped {k} of {pattern.n} points onto {len(np.unique(cells))} distinct "
        f"{partition.kind} cells"
    )
    return pattern.with_points(points)
