"""Gridded scalar fields over a rectangular window."""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Tuple, Union

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from lgcp_duplicates.errors import ConfigError, DataIOError
from lgcp_duplicates.geometry import Window

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class RasterField:
    """Cell-centred values on an ``nx`` by ``ny`` grid covering the window's bounding box.

    ``values[j, i]`` belongs to the cell in column ``i`` (x) and row ``j`` (y, south first).
    """

    window: Window
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=float, copy=True)
        if values.ndim != 2 or min(values.shape) < 1:
            raise ConfigError(f"Raster values must be a 2-D array, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ConfigError("Raster values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def nx(self) -> int:
        return int(self.values.shape[1])

    @property
    def ny(self) -> int:
        return int(self.values.shape[0])

    @property
    def dx(self) -> float:
        return self.window.lx / self.nx

    @property
    def dy(self) -> float:
        return self.window.ly / self.ny

    @property
    def cell_area(self) -> float:
        return self.dx * self.dy

    @property
    def x_centers(self) -> np.ndarray:
        x0, _, _, _ = self.window.bounds
        return x0 + (np.arange(self.nx) + 0.5) * self.dx

    @property
    def y_centers(self) -> np.ndarray:
        _, _, y0, _ = self.window.bounds
        return y0 + (np.arange(self.ny) + 0.5) * self.dy

    def centers(self) -> Tuple[np.ndarray, np.ndarray]:
        """Meshgrid (X, Y) of cell centres, each of shape (ny, nx)."""
        return np.meshgrid(self.x_centers, self.y_centers)

    def inside_mask(self) -> np.ndarray:
        """Cells whose centre lies in the window (all cells for rectangles)."""
        if self.window.is_rectangle:
            return np.ones(self.values.shape, dtype=bool)
        X, Y = self.centers()
        return self.window.contains(np.column_stack([X.ravel(), Y.ravel()]), tol=0.0).reshape(
            self.values.shape
        )

    def integral(self) -> float:
        """Midpoint-rule integral over the window."""
        return float((self.values * self.inside_mask()).sum() * self.cell_area)

    def scaled(self, factor: float) -> "RasterField":
        return RasterField(window=self.window, values=self.values * factor)

    def with_values(self, values: np.ndarray) -> "RasterField":
        return RasterField(window=self.window, values=values)

    def interpolate(self, points: np.ndarray) -> np.ndarray:
        """Bilinear interpolation at (N, 2) points, held constant beyond the outer centres."""
        pts = np.asarray(points, dtype=float).reshape(-1, 2)
        xc, yc = self.x_centers, self.y_centers
        qx = np.clip(pts[:, 0], xc[0], xc[-1])
        qy = np.clip(pts[:, 1], yc[0], yc[-1])
        if self.nx == 1 or self.ny == 1:
            ix = np.clip(np.searchsorted(xc, qx), 0, self.nx - 1)
            iy = np.clip(np.searchsorted(yc, qy), 0, self.ny - 1)
            return self.values[iy, ix]
        interpolator = RegularGridInterpolator((yc, xc), self.values, method="linear")
        return interpolator(np.column_stack([qy, qx]))

    # --- CSV format: 4 header lines, then ny rows north-up ---

    def to_csv(self, path: Union[str, Path]) -> None:
        self.window.require_rectangle("RasterField.to_csv")
        x0, x1, y0, y1 = self.window.bounds
        header = "\n".join(
            [f"xrange,{x0!r},{x1!r}", f"yrange,{y0!r},{y1!r}", f"nx,{self.nx}", f"ny,{self.ny}"]
        )
        try:
            Path(path).parent.mkdir(parents=True, exist_ok=True)
            np.savetxt(
                path, np.flipud(self.values), delimiter=",", header=header, comments="", fmt="%.17g"
            )
        except OSError as e:
            raise DataIOError(f"Cannot write raster {path}: {e}")

    @classmethod
    def from_csv(cls, path: Union[str, Path]) -> "RasterField":
        try:
            with Path(path).open("r", encoding="utf-8") as fh:
                meta = {}
                for _ in range(4):
                    key, *vals = fh.readline().strip().split(",")
                    meta[key] = vals
                values = np.loadtxt(fh, delimiter=",", ndmin=2)
        except OSError as e:
            raise DataIOError(f"Cannot read raster {path}: {e}")
        except ValueError as e:
            raise DataIOError(f"Malformed raster {path}: {e}")
        try:
            x0, x1 = map(float, meta["xrange"])
            y0, y1 = map(float, meta["yrange"])
            nx, ny = int(meta["nx"][0]), int(meta["ny"][0])
        except (KeyError, ValueError, IndexError) as e:
            raise DataIOError(f"Malformed raster header in {path}: {e}")
        if values.shape != (ny, nx):
            raise DataIOError(f"{path}: header declares {ny}x{nx}, data is {values.shape}")
        return cls(window=Window.rectangle(x0, x1, y0, y1), values=np.flipud(values))
