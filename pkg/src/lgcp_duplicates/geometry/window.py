"""Observation windows and point patterns."""

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np
import shapely
from shapely.geometry import Polygon, box
from shapely.geometry.base import BaseGeometry
from shapely.geometry.polygon import orient

from lgcp_duplicates.errors import ConfigError, OutOfDomainError, UnsupportedGeometryError


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=float, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class Window:
    """Bounded observation window: an axis-aligned rectangle or a simple polygon."""

    polygon: Polygon
    is_rectangle: bool

    @classmethod
    def rectangle(cls, x0: float, x1: float, y0: float, y1: float) -> "Window":
        if not (x1 > x0 and y1 > y0):
            raise ConfigError(f"Degenerate rectangle [{x0}, {x1}] x [{y0}, {y1}]")
        return cls(polygon=box(x0, y0, x1, y1, ccw=True), is_rectangle=True)

    @classmethod
    def from_vertices(cls, vertices: Sequence[Sequence[float]]) -> "Window":
        """Build a polygon window from a ring (closure implicit, any orientation)."""
        ring = [tuple(map(float, v)) for v in vertices]
        if len(ring) >= 2 and ring[0] == ring[-1]:
            ring = ring[:-1]
        if len(ring) < 3:
            raise ConfigError(f"Polygon window needs at least 3 vertices, got {len(ring)}")
        return cls.from_geometry(Polygon(ring))

    @classmethod
    def from_geometry(cls, geometry: BaseGeometry) -> "Window":
        if not isinstance(geometry, Polygon):
            raise ConfigError(f"Window must be a single polygon, got {geometry.geom_type}")
        if list(geometry.interiors):
            raise ConfigError("Windows with holes are not supported")
        if not geometry.is_valid or geometry.area <= 0:
            raise ConfigError("Window polygon is not a simple ring with positive area")
        polygon = orient(geometry, sign=1.0)
        x0, y0, x1, y1 = polygon.bounds
        if math.isclose(polygon.area, (x1 - x0) * (y1 - y0), rel_tol=1e-12) and len(
            polygon.exterior.coords
        ) == 5:
            return cls.rectangle(x0, x1, y0, y1)
        return cls(polygon=polygon, is_rectangle=False)

    # --- derived quantities ---

    @property
    def area(self) -> float:
        return float(self.polygon.area)

    @property
    def bounds(self) -> Tuple[float, float, float, float]:
        """(x0, x1, y0, y1)."""
        x0, y0, x1, y1 = self.polygon.bounds
        return float(x0), float(x1), float(y0), float(y1)

    @property
    def lx(self) -> float:
        x0, x1, _, _ = self.bounds
        return x1 - x0

    @property
    def ly(self) -> float:
        _, _, y0, y1 = self.bounds
        return y1 - y0

    @property
    def diameter(self) -> float:
        return math.hypot(self.lx, self.ly)

    def require_rectangle(self, operation: str) -> None:
        if not self.is_rectangle:
            raise UnsupportedGeometryError(f"{operation} requires a rectangular window")

    def default_tolerance(self, rel_tol: float = 1e-9) -> float:
        return rel_tol * max(self.lx, self.ly)

    def contains(self, points: np.ndarray, tol: Optional[float] = None) -> np.ndarray:
        """Boundary-inclusive containment mask for an (N, 2) array."""
        pts = np.asarray(points, dtype=float).reshape(-1, 2)
        if tol is None:
            tol = self.default_tolerance()
        if self.is_rectangle:
            x0, x1, y0, y1 = self.bounds
            return (
                (pts[:, 0] >= x0 - tol)
                & (pts[:, 0] <= x1 + tol)
                & (pts[:, 1] >= y0 - tol)
                & (pts[:, 1] <= y1 + tol)
            )
        if len(pts) == 0:
            return np.zeros(0, dtype=bool)
        geoms = shapely.points(pts)
        return shapely.distance(self.polygon, geoms) <= tol

    def boundary_distance(self, points: np.ndarray) -> np.ndarray:
        """Distance from each point to the window boundary."""
        pts = np.asarray(points, dtype=float).reshape(-1, 2)
        if self.is_rectangle:
            x0, x1, y0, y1 = self.bounds
            return np.minimum.reduce(
                [pts[:, 0] - x0, x1 - pts[:, 0], pts[:, 1] - y0, y1 - pts[:, 1]]
            ).clip(min=0.0)
        return shapely.distance(self.polygon.exterior, shapely.points(pts))

    def describe(self) -> str:
        if self.is_rectangle:
            x0, x1, y0, y1 = self.bounds
            return f"rectangle[{x0:g},{x1:g}]x[{y0:g},{y1:g}]"
        return f"polygon(n={len(self.polygon.exterior.coords) - 1},area={self.area:g})"


@dataclass(frozen=True, eq=False)
class PointPattern:
    """Finite planar point pattern observed in a window."""

    points: np.ndarray
    window: Window

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=float).reshape(-1, 2)
        if not np.all(np.isfinite(pts)):
            raise ConfigError("Point coordinates must be finite")
        inside = self.window.contains(pts)
        if not np.all(inside):
            first = pts[~inside][0]
            raise OutOfDomainError(
                f"{int((~inside).sum())} point(s) outside {self.window.describe()}, "
                f"e.g. ({first[0]:g}, {first[1]:g})"
            )
        object.__setattr__(self, "points", _frozen(pts))

    @classmethod
    def from_iterable(cls, points: Iterable[Sequence[float]], window: Window) -> "PointPattern":
        coords = np.array([tuple(p) for p in points], dtype=float).reshape(-1, 2)
        return cls(points=coords, window=window)

    @property
    def n(self) -> int:
        return int(self.points.shape[0])

    @property
    def x(self) -> np.ndarray:
        return self.points[:, 0]

    @property
    def y(self) -> np.ndarray:
        return self.points[:, 1]

    def with_points(self, points: np.ndarray) -> "PointPattern":
        return PointPattern(points=points, window=self.window)

    def __len__(self) -> int:
        return self.n
