"""Empirical and theoretical K-functions."""

from .estimate import DEFAULT_R_POINTS, KEstimate, default_r_grid, validate_r_grid
from .estimators import k_hom, k_inhom, theoretical_estimate, translation_correction

__all__ = [
    "DEFAULT_R_POINTS",
    "KEstimate",
    "default_r_grid",
    "k_hom",
    "k_inhom",
    "theoretical_estimate",
    "translation_correction",
    "validate_r_grid",
]
