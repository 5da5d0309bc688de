"""Point-pattern CSV files (header ``x,y``, one point per row)."""

import logging
from pathlib import Path
from typing import Union

import numpy as np

from lgcp_duplicates.errors import DataIOError

from .window import PointPattern, Window

logger = logging.getLogger(__name__)


def read_pattern_csv(path: Union[str, Path], window: Window) -> PointPattern:
    """Read an ``x,y`` CSV; the window comes from configuration, not the file."""
    path = Path(path)
    try:
        with path.open("r", encoding="utf-8") as fh:
            header = fh.readline().strip().replace(" ", "").lower()
            if header != "x,y":
                raise DataIOError(f"{path}: expected header 'x,y', got {header!r}")
            data = np.loadtxt(fh, delimiter=",", ndmin=2)
    except OSError as e:
        raise DataIOError(f"Cannot read point pattern {path}: {e}")
    except ValueError as e:
        raise DataIOError(f"Malformed coordinates in {path}: {e}")
    points = data.reshape(-1, 2) if data.size else np.zeros((0, 2))
    logger.info(f"Read {len(points)} points from {path}")
    return PointPattern(points=points, window=window)


def write_pattern_csv(pattern: PointPattern, path: Union[str, Path]) -> None:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        np.savetxt(path, pattern.points, delimiter=",", header="x,y", comments="", fmt="%.17g")
    except OSError as e:
        raise DataIOError(f"Cannot write point pattern {path}: {e}")
