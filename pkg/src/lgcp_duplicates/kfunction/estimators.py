"""Homogeneous and inhomogeneous K-function estimators.

Rectangular windows use the translation correction. Polygon windows use the border
correction: an ordered pair (i, j) counts at distance r only if x_i lies at least r from
the window boundary, and each r is renormalised by the retained reference points.
Coincident points form pairs at distance zero with weight 1, so duplicates make K(0) > 0.
"""

import logging
from typing import Optional, Tuple, Union

import numpy as np
from scipy.spatial import cKDTree

from lgcp_duplicates.errors import (
    InfiniteWeightError,
    InsufficientPointsError,
    InvalidIntensityError,
)
from lgcp_duplicates.geometry import PointPattern, Window
from lgcp_duplicates.models import CovarianceParams
from lgcp_duplicates.simulate import RasterField, theoretical_k_curve

from .estimate import KEstimate, validate_r_grid

logger = logging.getLogger(__name__)

INTENSITY_FLOOR = 1e-12

IntensityInput = Union[RasterField, float, np.ndarray]


def translation_correction(s, u, window: Window) -> float:
    """Translation weight |W| / |W intersected with W + (u - s)|.

    For a rectangle this is Lx * Ly / ((Lx - |dx|) * (Ly - |dy|)).
    """
    window.require_rectangle("translation_correction")
    dx, dy = abs(u[0] - s[0]), abs(u[1] - s[1])
    lx, ly = window.lx, window.ly
    if dx >= lx or dy >= ly:
        raise InfiniteWeightError(
            f"Offset ({dx:g}, {dy:g}) leaves no overlap in {window.describe()}"
        )
    return (lx * ly) / ((lx - dx) * (ly - dy))


def _close_pairs(points: np.ndarray, r_max: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Unordered index pairs within r_max, with their distances."""
    pairs = cKDTree(points).query_pairs(r_max, output_type="ndarray")
    if pairs.size == 0:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty, np.zeros(0)
    i, j = pairs[:, 0], pairs[:, 1]
    d = np.hypot(points[i, 0] - points[j, 0], points[i, 1] - points[j, 1])
    return i, j, d


def _cumulative(d: np.ndarray, weights: np.ndarray, r: np.ndarray) -> np.ndarray:
    """sum of weights over pairs with d <= r, for every r of the grid."""
    order = np.argsort(d, kind="stable")
    running = np.concatenate([[0.0], np.cumsum(weights[order])])
    return running[np.searchsorted(d[order], r, side="right")]


def _translation_sum(
    points: np.ndarray, window: Window, r: np.ndarray, point_weight: Optional[np.ndarray] = None
) -> np.ndarray:
    """sum over ordered pairs i != j of 1[d_ij <= r] * e_ij * w_i * w_j."""
    i, j, d = _close_pairs(points, float(r[-1]))
    dx = np.abs(points[i, 0] - points[j, 0])
    dy = np.abs(points[i, 1] - points[j, 1])
    lx, ly = window.lx, window.ly
    valid = (dx < lx) & (dy < ly)
    if not np.all(valid):
        logger.warning(f"Excluded {int((~valid).sum())} pair(s) with no translated overlap")
    weights = (lx * ly) / ((lx - dx[valid]) * (ly - dy[valid]))
    if point_weight is not None:
        weights = weights * point_weight[i[valid]] * point_weight[j[valid]]
    return 2.0 * _cumulative(d[valid], weights, r)


def _border_sums(
    points: np.ndarray, window: Window, r: np.ndarray, point_weight: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    """Border-corrected sums over reference points i with b_i >= r.

    Returns the numerator sum_i w_i sum_{j != i, d_ij <= r} w_j and the denominator sum_i w_i.
    """
    b = window.boundary_distance(points)
    i, j, d = _close_pairs(points, float(r[-1]))
    ref = np.concatenate([i, j])
    other = np.concatenate([j, i])
    dd = np.concatenate([d, d])
    weight = point_weight[ref] * point_weight[other]
    # ordered pair counts for r in [d_ij, b_ref]
    start = np.searchsorted(r, dd, side="left")
    stop = np.searchsorted(r, b[ref], side="right")
    keep = start < stop
    delta = np.zeros(r.size + 1)
    np.add.at(delta, start[keep], weight[keep])
    np.add.at(delta, stop[keep], -weight[keep])
    numerator = np.cumsum(delta)[:-1]

    order = np.argsort(b)
    tail = np.concatenate([np.cumsum(point_weight[order][::-1])[::-1], [0.0]])
    denominator = tail[np.searchsorted(b[order], r, side="left")]
    return numerator, denominator


def _safe_ratio(numerator: np.ndarray, denominator: np.ndarray) -> np.ndarray:
    out = np.zeros_like(numerator)
    np.divide(numerator, denominator, out=out, where=denominator > 0)
    return out


def k_hom(pattern: PointPattern, r_grid: np.ndarray) -> KEstimate:
    """Homogeneous K with intensity (N - 1) / |W|.

    Raises:
        InsufficientPointsError: If N < 2.
    """
    r = validate_r_grid(r_grid)
    n = pattern.n
    if n < 2:
        raise InsufficientPointsError(f"K estimation needs N >= 2, got N={n}")
    window = pattern.window
    if window.is_rectangle:
        khat = window.area / (n * (n - 1)) * _translation_sum(pattern.points, window, r)
        correction = "translation"
    else:
        numerator, denominator = _border_sums(pattern.points, window, r, np.ones(n))
        khat = window.area / (n - 1) * _safe_ratio(numerator, denominator)
        correction = "border"
    return KEstimate(
        r=r,
        khat=khat,
        variant="hom",
        n_points=n,
        meta={
            "window": window.describe(),
            "intensity": f"constant {(n - 1) / window.area:.10g}",
            "correction": correction,
        },
    )


def _intensity_at_points(
    pattern: PointPattern, intensity: IntensityInput
) -> Tuple[np.ndarray, str]:
    if isinstance(intensity, RasterField):
        values = intensity.interpolate(pattern.points)
        ceiling = float(np.max(intensity.values))
        source = f"raster {intensity.nx}x{intensity.ny}"
    else:
        values = np.broadcast_to(np.asarray(intensity, dtype=float), (pattern.n,)).copy()
        ceiling = float(np.max(values)) if values.size else 0.0
        source = "constant" if np.ndim(intensity) == 0 else "per-point values"
    if np.any(~np.isfinite(values)) or np.any(values <= 0):
        bad = int(np.sum(~(values > 0)))
        raise InvalidIntensityError(f"Intensity is not positive at {bad} data point(s)")
    floor = INTENSITY_FLOOR * ceiling
    clamped = values < floor
    if np.any(clamped):
        logger.warning(f"Clamped intensity at {int(clamped.sum())} point(s) to {floor:.3e}")
        values = np.maximum(values, floor)
    return values, source


def k_inhom(pattern: PointPattern, intensity: IntensityInput, r_grid: np.ndarray) -> KEstimate:
    """Inhomogeneous K: sum over ordered pairs of 1[d <= r] * e / (lambda_i * lambda_j * |W|).

    ``intensity`` is a raster (bilinearly interpolated at the data points), a constant,
    or one value per point.

    Raises:
        InsufficientPointsError: If N < 2.
        InvalidIntensityError: If the intensity is not positive at a data point.
    """
    r = validate_r_grid(r_grid)
    n = pattern.n
    if n < 2:
        raise InsufficientPointsError(f"K estimation needs N >= 2, got N={n}")
    lam, source = _intensity_at_points(pattern, intensity)
    window = pattern.window
    if window.is_rectangle:
        khat = _translation_sum(pattern.points, window, r, 1.0 / lam) / window.area
        correction = "translation"
    else:
        numerator, denominator = _border_sums(pattern.points, window, r, 1.0 / lam)
        khat = _safe_ratio(numerator, denominator)
        correction = "border"
    return KEstimate(
        r=r,
        khat=khat,
        variant="inhom",
        n_points=n,
        meta={"window": window.describe(), "intensity": source, "correction": correction},
    )


def theoretical_estimate(r_grid: np.ndarray, cov: CovarianceParams) -> KEstimate:
    """The LGCP K-function as a KEstimate, for noiseless fits and reference curves."""
    r = validate_r_grid(r_grid)
    return KEstimate(
        r=r,
        khat=theoretical_k_curve(r, cov),
        variant="theoretical",
        n_points=0,
        meta={"phi": cov.phi, "sigma2": cov.sigma2},
    )
