"""First-order intensity estimation and bandwidth selection."""

from .bandwidth import cvl_criterion, default_candidates, red, select_bandwidth_cvl
from .kernel import (
    adaptive_bandwidths,
    constant_intensity,
    edge_factors,
    intensity_at_points,
    kernel_intensity_adaptive,
    kernel_intensity_fixed,
)

__all__ = [
    "adaptive_bandwidths",
    "constant_intensity",
    "cvl_criterion",
    "default_candidates",
    "edge_factors",
    "intensity_at_points",
    "kernel_intensity_adaptive",
    "kernel_intensity_fixed",
    "red",
    "select_bandwidth_cvl",
]
