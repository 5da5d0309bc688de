"""Duplicate detection and partition-scale helpers."""

import math
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from lgcp_duplicates.errors import ConfigError, DomainError

from .window import PointPattern


@dataclass(frozen=True, eq=False)
class MultiplicityMap:
    """Distinct locations of a pattern with the number of coincident points at each.

    ``labels[i]`` is the group of point ``i``; groups are numbered by first occurrence,
    and ``first_index[g]`` is the input index of the representative of group ``g``.
    """

    locations: np.ndarray
    counts: np.ndarray
    labels: np.ndarray
    first_index: np.ndarray

    @property
    def n_points(self) -> int:
        return int(self.counts.sum())

    @property
    def n_distinct(self) -> int:
        return int(self.counts.shape[0])

    @property
    def has_duplicates(self) -> bool:
        return bool(np.any(self.counts > 1))

    def duplicated_mask(self) -> np.ndarray:
        """True for every point belonging to a group of multiplicity > 1."""
        return self.counts[self.labels] > 1

    def as_dict(self) -> Dict[Tuple[float, float], int]:
        return {
            (float(x), float(y)): int(c) for (x, y), c in zip(self.locations, self.counts)
        }


def _group_labels(points: np.ndarray, tol: float) -> np.ndarray:
    if tol == 0.0:
        _, inverse = np.unique(points, axis=0, return_inverse=True)
        return inverse.reshape(-1)
    pairs = cKDTree(points).query_pairs(r=tol, output_type="ndarray")
    n = points.shape[0]
    graph = coo_matrix(
        (np.ones(len(pairs), dtype=np.int8), (pairs[:, 0], pairs[:, 1])), shape=(n, n)
    )
    _, labels = connected_components(graph, directed=False)
    return labels


def find_duplicates(pattern: PointPattern, tol: Optional[float] = None) -> MultiplicityMap:
    """Group points closer than ``tol`` (transitively) and count each group.

    The default tolerance is ``1e-9 * max(L_x, L_y)`` of the pattern window.
    """
    if tol is None:
        tol = pattern.window.default_tolerance()
    if tol < 0:
        raise ConfigError(f"Duplicate tolerance must be >= 0, got {tol}")

    points = pattern.points
    if pattern.n == 0:
        empty = np.zeros(0, dtype=np.int64)
        return MultiplicityMap(np.zeros((0, 2)), empty, empty, empty)

    raw = _group_labels(points, float(tol))
    groups, first, inverse = np.unique(raw, return_index=True, return_inverse=True)
    order = np.argsort(first, kind="stable")
    rank = np.empty_like(order)
    rank[order] = np.arange(len(groups))
    labels = rank[inverse.reshape(-1)]
    first_index = first[order]
    counts = np.bincount(labels, minlength=len(groups))
    return MultiplicityMap(
        locations=points[first_index].copy(),
        counts=counts,
        labels=labels,
        first_index=first_index,
    )


def equivalent_diameter(area: float) -> float:
    """Diameter of the circle with the given area, 2 * sqrt(area / pi)."""
    if not area > 0:
        raise DomainError(f"Area must be positive, got {area}")
    return 2.0 * math.sqrt(area / math.pi)
