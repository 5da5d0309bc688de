"""Geometry package: windows, partitions, point location and duplicates."""

from .duplicates import MultiplicityMap, equivalent_diameter, find_duplicates
from .io import read_pattern_csv, write_pattern_csv
from .partition import (
    Partition,
    load_partition,
    locate,
    locate_many,
    make_dirichlet_tessellation,
    make_regular_grid,
    random_tessellation,
    save_partition,
)
from .window import PointPattern, Window

__all__ = [
    "MultiplicityMap",
    "Partition",
    "PointPattern",
    "Window",
    "equivalent_diameter",
    "find_duplicates",
    "load_partition",
    "locate",
    "locate_many",
    "make_dirichlet_tessellation",
    "make_regular_grid",
    "random_tessellation",
    "read_pattern_csv",
    "save_partition",
    "write_pattern_csv",
]
