"""Bandwidth selection and estimator-quality scores."""

import logging
import math
from typing import Literal, Optional, Sequence, Tuple

import numpy as np

from lgcp_duplicates.errors import (
    ConfigError,
    DegeneratePilotError,
    DomainError,
    InsufficientPointsError,
    SelectionFailureError,
)
from lgcp_duplicates.geometry import PointPattern, Window

from .kernel import adaptive_bandwidths, intensity_at_points

logger = logging.getLogger(__name__)

N_CANDIDATES = 25


def default_candidates(window: Window, grid: Tuple[int, int] = (128, 128)) -> np.ndarray:
    """Log-spaced bandwidths from four evaluation-grid cells to a quarter of the window diameter."""
    nx, ny = grid
    cell = max(window.lx / nx, window.ly / ny)
    lo, hi = 4.0 * cell, window.diameter / 4.0
    if not hi > lo:
        raise ConfigError(f"Evaluation grid {nx}x{ny} too coarse for candidate range")
    return np.geomspace(lo, hi, N_CANDIDATES)


def cvl_criterion(
    pattern: PointPattern,
    h: float,
    grid: Tuple[int, int] = (128, 128),
    kind: Literal["fixed", "adaptive"] = "fixed",
    pilot_h: Optional[float] = None,
) -> float:
    """(sum_i 1 / lambda_h(x_i) - |W|)^2; infinite if the estimate vanishes at a data point."""
    if kind == "adaptive":
        try:
            hs = adaptive_bandwidths(pattern, h, pilot_h, grid)
        except DegeneratePilotError:
            return math.inf
    else:
        hs = np.full(pattern.n, float(h))
    lam = intensity_at_points(pattern, hs, grid)
    if np.any(~(lam > 0)) or np.any(~np.isfinite(lam)):
        return math.inf
    return float((np.sum(1.0 / lam) - pattern.window.area) ** 2)


def select_bandwidth_cvl(
    pattern: PointPattern,
    candidates: Optional[Sequence[float]] = None,
    grid: Tuple[int, int] = (128, 128),
    kind: Literal["fixed", "adaptive"] = "fixed",
    pilot_h: Optional[float] = None,
) -> float:
    """Candidate bandwidth minimising the CvL criterion (first one on ties).

    With ``kind="adaptive"`` the candidates are global bandwidths h0 of the adaptive
    estimator; the pilot defaults to each candidate itself.

    Raises:
        ConfigError: If a candidate is not positive or the list is empty.
        SelectionFailureError: If every candidate yields zero intensity at some data point.
    """
    if pattern.n < 1:
        raise InsufficientPointsError("Bandwidth selection needs at least one point")
    hs = default_candidates(pattern.window, grid) if candidates is None else np.asarray(
        candidates, dtype=float
    )
    if hs.size == 0 or np.any(~(hs > 0)):
        raise ConfigError("Bandwidth candidates must be a non-empty list of positive values")
    scores = np.array([cvl_criterion(pattern, float(h), grid, kind, pilot_h) for h in hs])
    if not np.any(np.isfinite(scores)):
        raise SelectionFailureError(
            f"All {hs.size} candidates give zero intensity at some data point"
        )
    best = float(hs[int(np.argmin(scores))])
    logger.info(f"CvL ({kind}) selected bandwidth {best:.4g} from {hs.size} candidates")
    return best


def red(phi_hat: float, sigma2_hat: float, phi_true: float, sigma2_true: float) -> float:
    """Relative Euclidean distance sqrt(ARE(phi)^2 + ARE(sigma2)^2)."""
    if not (phi_true > 0 and sigma2_true > 0):
        raise DomainError(f"True parameters must be positive, got ({phi_true}, {sigma2_true})")
    return math.hypot((phi_hat - phi_true) / phi_true, (sigma2_hat - sigma2_true) / sigma2_true)
