"""Ad-hoc duplicate remedies applied to a pattern before K estimation.

- dedup: keep one point per duplicate group.
- jitter: perturb every duplicated point by U(-d, d) per coordinate.
- redistribute: redraw every duplicated point uniformly inside its cell.
"""

import logging
from typing import Optional

import numpy as np
import shapely

from lgcp_duplicates.errors import ConfigError, SamplingError
from lgcp_duplicates.geometry import Partition, PointPattern, find_duplicates, locate_many
from lgcp_duplicates.simulate import SeedLike, as_generator

logger = logging.getLogger(__name__)

MAX_REJECTION_TRIES = 1_000_000


def dedup(pattern: PointPattern, tol: Optional[float] = None) -> PointPattern:
    """One representative per duplicate group, the first in input order."""
    groups = find_duplicates(pattern, tol)
    if not groups.has_duplicates:
        return pattern
    keep = np.sort(groups.first_index)
    logger.debug(f"Deduplication kept {keep.size} of {pattern.n} points")
    return pattern.with_points(pattern.points[keep])


def jitter(
    pattern: PointPattern, d: float, seed: SeedLike, tol: Optional[float] = None
) -> PointPattern:
    """Independent U(-d, d) offsets for every member of a duplicate group.

    Perturbed points that leave the window are dropped; other points are untouched.
    """
    if not d > 0:
        raise ConfigError(f"Jitter radius must be positive, got {d}")
    mask = find_duplicates(pattern, tol).duplicated_mask()
    if not mask.any():
        return pattern
    rng = as_generator(seed)
    points = np.array(pattern.points, copy=True)
    moved = np.flatnonzero(mask)
    points[moved] += rng.uniform(-d, d, size=(moved.size, 2))
    keep = np.ones(pattern.n, dtype=bool)
    keep[moved] = pattern.window.contains(points[moved], tol=0.0)
    dropped = int((~keep).sum())
    if dropped:
        logger.warning(f"Jitter dropped {dropped} point(s) that left {pattern.window.describe()}")
    return pattern.with_points(points[keep])


def _uniform_in_cell(cell, count: int, rng: np.random.Generator) -> np.ndarray:
    minx, miny, maxx, maxy = cell.bounds
    accepted = np.zeros((0, 2))
    tries = 0
    while accepted.shape[0] < count:
        batch = max(2 * (count - accepted.shape[0]), 16)
        if tries + batch > MAX_REJECTION_TRIES:
            raise SamplingError(
                f"Rejection sampling in cell with area {cell.area:.6g} exceeded "
                f"{MAX_REJECTION_TRIES} tries"
            )
        tries += batch
        draw = np.column_stack(
            [rng.uniform(minx, maxx, size=batch), rng.uniform(miny, maxy, size=batch)]
        )
        inside = shapely.contains_xy(cell, draw[:, 0], draw[:, 1])
        accepted = np.vstack([accepted, draw[inside]])
    return accepted[:count]


def redistribute(
    pattern: PointPattern, partition: Partition, seed: SeedLike, tol: Optional[float] = None
) -> PointPattern:
    """Replace every duplicated point by a uniform draw inside its containing cell.

    N is preserved and non-duplicated points keep their coordinates.

    Raises:
        SamplingError: If a cell rejects 10^6 bounding-box proposals.
    """
    mask = find_duplicates(pattern, tol).duplicated_mask()
    if not mask.any():
        return pattern
    rng = as_generator(seed)
    points = np.array(pattern.points, copy=True)
    moved = np.flatnonzero(mask)
    cells = locate_many(partition, points[moved])
    for k in np.unique(cells):
        members = moved[cells == k]
        points[members] = _uniform_in_cell(partition.cells[int(k)], members.size, rng)
    return pattern.with_points(points)
