"""Partitions of the observation window: regular grids, Dirichlet tessellations, polygons."""

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import shapely
from pydantic import BaseModel, Field, ValidationError
from shapely.geometry import MultiPoint, Polygon, box
from shapely.geometry.base import BaseGeometry
from shapely.ops import nearest_points, unary_union, voronoi_diagram
from shapely.strtree import STRtree

from lgcp_duplicates.errors import (
    ConfigError,
    DataIOError,
    DegenerateSeedError,
    InvalidPartitionError,
    OutOfDomainError,
)

from .window import Window

logger = logging.getLogger(__name__)

COVERAGE_REL_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class Partition:
    """Cells tiling a window, with precomputed areas and snapping points.

    ``snap_points[k]`` is the centroid of cell ``k`` when it lies inside the window,
    otherwise the point of the cell nearest to the centroid.
    """

    window: Window
    cells: Tuple[BaseGeometry, ...]
    areas: np.ndarray
    snap_points: np.ndarray
    ids: Tuple[str, ...]
    kind: str
    grid_shape: Optional[Tuple[int, int]] = None

    @property
    def n_cells(self) -> int:
        return len(self.cells)

    @property
    def mean_cell_area(self) -> float:
        return float(self.areas.mean())

    def grid_index(self, k: int) -> Tuple[int, int]:
        """(ix, iy) of cell ``k`` in a regular grid."""
        if self.grid_shape is None:
            raise ConfigError("grid_index is only defined for regular grids")
        nx, _ = self.grid_shape
        return k % nx, k // nx

    def tree(self) -> STRtree:
        cached = self.__dict__.get("_tree")
        if cached is None:
            cached = STRtree(list(self.cells))
            object.__setattr__(self, "_tree", cached)
        return cached

    def to_document(self) -> Dict[str, Any]:
        """Export as the ``{"cells": [{"id", "ring"}]}`` JSON document."""
        cells = []
        for cid, cell in zip(self.ids, self.cells):
            polygon = cell if isinstance(cell, Polygon) else max(cell.geoms, key=lambda g: g.area)
            ring = [[float(x), float(y)] for x, y in list(polygon.exterior.coords)[:-1]]
            cells.append({"id": cid, "ring": ring})
        return {"cells": cells}


def _snap_point(cell: BaseGeometry, window: Window) -> Tuple[float, float]:
    centroid = cell.centroid
    if window.contains(np.array([[centroid.x, centroid.y]]))[0]:
        return float(centroid.x), float(centroid.y)
    nearest, _ = nearest_points(cell, centroid)
    logger.debug(f"Centroid outside window; snapping to nearest cell point {nearest.wkt}")
    return float(nearest.x), float(nearest.y)


def _build(
    window: Window,
    cells: Sequence[BaseGeometry],
    kind: str,
    ids: Optional[Sequence[str]] = None,
    grid_shape: Optional[Tuple[int, int]] = None,
    snap_points: Optional[np.ndarray] = None,
) -> Partition:
    areas = np.array([c.area for c in cells], dtype=float)
    if snap_points is None:
        snap_points = np.array([_snap_point(c, window) for c in cells], dtype=float)
    total = float(areas.sum())
    if abs(total - window.area) > COVERAGE_REL_TOL * window.area:
        raise InvalidPartitionError(
            f"Cell areas sum to {total:.9g}, window area is {window.area:.9g}"
        )
    areas.setflags(write=False)
    snap_points.setflags(write=False)
    return Partition(
        window=window,
        cells=tuple(cells),
        areas=areas,
        snap_points=snap_points,
        ids=tuple(ids) if ids is not None else tuple(str(k) for k in range(len(cells))),
        kind=kind,
        grid_shape=grid_shape,
    )


def make_regular_grid(window: Window, nx: int, ny: int) -> Partition:
    """Split a rectangular window into ``nx * ny`` congruent cells, x varying fastest."""
    window.require_rectangle("make_regular_grid")
    if nx < 1 or ny < 1:
        raise ConfigError(f"Grid dimensions must be positive, got {nx}x{ny}")
    x0, x1, y0, y1 = window.bounds
    xs = np.linspace(x0, x1, nx + 1)
    ys = np.linspace(y0, y1, ny + 1)
    cells = [box(xs[i], ys[j], xs[i + 1], ys[j + 1]) for j in range(ny) for i in range(nx)]
    cx = 0.5 * (xs[:-1] + xs[1:])
    cy = 0.5 * (ys[:-1] + ys[1:])
    centers = np.array([(cx[i], cy[j]) for j in range(ny) for i in range(nx)], dtype=float)
    partition = _build(window, cells, "grid", grid_shape=(nx, ny), snap_points=centers)
    logger.info(f"Built {nx}x{ny} grid, cell area {partition.mean_cell_area:.6g}")
    return partition


def make_dirichlet_tessellation(window: Window, seeds: np.ndarray) -> Partition:
    """Voronoi cells of ``seeds`` clipped to the window; cell ``k`` belongs to seed ``k``."""
    seeds = np.asarray(seeds, dtype=float).reshape(-1, 2)
    if len(seeds) == 0:
        raise DegenerateSeedError("Tessellation needs at least one seed")
    if len(np.unique(seeds, axis=0)) != len(seeds):
        raise DegenerateSeedError("Tessellation seeds must be distinct")
    inside = window.contains(seeds, tol=0.0)
    if not np.all(inside):
        raise DegenerateSeedError(f"{int((~inside).sum())} seed(s) outside the window")

    if len(seeds) == 1:
        return _build(window, [window.polygon], "tessellation")

    x0, x1, y0, y1 = window.bounds
    pad = window.diameter
    envelope = box(x0 - pad, y0 - pad, x1 + pad, y1 + pad)
    regions = list(voronoi_diagram(MultiPoint(seeds), envelope=envelope).geoms)

    seed_tree = STRtree(shapely.points(seeds))
    cells: List[Optional[BaseGeometry]] = [None] * len(seeds)
    for region in regions:
        hits = seed_tree.query(region, predicate="contains")
        if len(hits) != 1:
            hits = seed_tree.query(region, predicate="intersects")
        for k in hits:
            if cells[int(k)] is None:
                cells[int(k)] = region.intersection(window.polygon)
                break
    missing = [k for k, c in enumerate(cells) if c is None or c.is_empty]
    if missing:
        raise DegenerateSeedError(f"Could not assign Voronoi regions to seeds {missing[:5]}")

    partition = _build(window, cells, "tessellation")
    logger.info(
        f"Built Dirichlet tessellation with {partition.n_cells} cells, "
        f"mean area {partition.mean_cell_area:.6g}"
    )
    return partition


def random_tessellation(window: Window, n_cells: int, seed: int) -> Partition:
    """Tessellation of ``n_cells`` uniform random seeds (rejection-sampled in the window)."""
    rng = np.random.default_rng(seed)
    x0, x1, y0, y1 = window.bounds
    seeds = np.zeros((0, 2))
    while len(seeds) < n_cells:
        draw = np.column_stack(
            [rng.uniform(x0, x1, size=2 * n_cells), rng.uniform(y0, y1, size=2 * n_cells)]
        )
        draw = draw[window.contains(draw, tol=0.0)]
        seeds = np.vstack([seeds, draw])
    return make_dirichlet_tessellation(window, seeds[:n_cells])


# --- Partition documents ---


class CellRecord(BaseModel):
    """One polygon of a partition document; the ring is closed implicitly."""

    id: Union[str, int]
    ring: List[Tuple[float, float]] = Field(..., min_length=3)


class PartitionDocument(BaseModel):
    cells: List[CellRecord] = Field(..., min_length=1)


def _parse_document(source: Union[str, Path, Dict[str, Any]]) -> PartitionDocument:
    if isinstance(source, dict):
        payload = source
    else:
        text = str(source)
        path = Path(text)
        try:
            if not text.lstrip().startswith("{"):
                text = path.read_text(encoding="utf-8")
            payload = json.loads(text)
        except OSError as e:
            raise DataIOError(f"Cannot read partition document {source}: {e}")
        except json.JSONDecodeError as e:
            raise InvalidPartitionError(f"Partition document is not valid JSON: {e}")
    try:
        return PartitionDocument.model_validate(payload)
    except ValidationError as e:
        raise InvalidPartitionError(f"Partition document does not match schema: {e}")


def load_partition(
    source: Union[str, Path, Dict[str, Any]], window: Optional[Window] = None
) -> Partition:
    """Load a partition from a polygon-collection document.

    Without an explicit window the union of the cells is used.
    """
    document = _parse_document(source)
    cells: List[Polygon] = []
    for record in document.cells:
        ring = list(record.ring)
        if ring[0] == ring[-1]:
            ring = ring[:-1]
        polygon = Polygon(ring)
        if not polygon.is_valid or polygon.area <= 0:
            raise InvalidPartitionError(f"Cell {record.id} is not a simple polygon")
        cells.append(polygon)

    union = unary_union(cells)
    if window is None:
        window = Window.from_geometry(union)

    tol = COVERAGE_REL_TOL * window.area
    total = sum(c.area for c in cells)
    if total - union.area > tol:
        raise InvalidPartitionError(f"Cells overlap by {total - union.area:.6g} area units")
    if window.polygon.difference(union).area > tol:
        raise InvalidPartitionError("Cells leave a coverage gap in the window")
    if union.difference(window.polygon).area > tol:
        raise InvalidPartitionError("Cells extend outside the window")

    return _build(window, cells, "polygons", ids=[str(r.id) for r in document.cells])


def save_partition(partition: Partition, path: Union[str, Path]) -> None:
    try:
        Path(path).write_text(json.dumps(partition.to_document(), indent=2), encoding="utf-8")
    except OSError as e:
        raise DataIOError(f"Cannot write partition document {path}: {e}")


# --- Point location ---


def locate_many(partition: Partition, points: np.ndarray) -> np.ndarray:
    """Cell index for each point; boundary ties go to the lowest index."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    inside = partition.window.contains(pts)
    if not np.all(inside):
        bad = pts[~inside][0]
        raise OutOfDomainError(f"Point ({bad[0]:g}, {bad[1]:g}) is outside the window")
    if len(pts) == 0:
        return np.zeros(0, dtype=np.int64)

    if partition.grid_shape is not None:
        nx, ny = partition.grid_shape
        x0, x1, y0, y1 = partition.window.bounds
        ix = np.ceil((pts[:, 0] - x0) / ((x1 - x0) / nx)).astype(np.int64) - 1
        iy = np.ceil((pts[:, 1] - y0) / ((y1 - y0) / ny)).astype(np.int64) - 1
        return np.clip(iy, 0, ny - 1) * nx + np.clip(ix, 0, nx - 1)

    geoms = shapely.points(pts)
    tree = partition.tree()
    query_idx, cell_idx = tree.query(geoms, predicate="intersects")
    result = np.full(len(pts), np.iinfo(np.int64).max, dtype=np.int64)
    np.minimum.at(result, query_idx, cell_idx.astype(np.int64))
    unmatched = np.flatnonzero(result == np.iinfo(np.int64).max)
    if len(unmatched):
        # points in sliver gaps left by floating-point clipping
        for i in unmatched:
            result[i] = int(tree.nearest(geoms[i]))
    return result


def locate(partition: Partition, p: Sequence[float]) -> int:
    """Index of the unique cell whose closure contains ``p`` (lowest index on ties)."""
    return int(locate_many(partition, np.asarray([p], dtype=float))[0])
