"""Minimum-contrast fitting of (phi, sigma2) and the delta / r_max rules of thumb."""

import logging
import math
from typing import List, Optional

import numpy as np
from scipy.optimize import OptimizeResult, minimize
from scipy.stats import qmc

from lgcp_duplicates.errors import NonConvergenceError, UnsupportedRuleError
from lgcp_duplicates.geometry import Window, equivalent_diameter
from lgcp_duplicates.kfunction import KEstimate
from lgcp_duplicates.models import (
    ContrastConfig,
    FitDiagnostics,
    FitResult,
    MethodLabel,
    OptimizerSpec,
    ParameterBounds,
)

from .contrast import ContrastObjective

logger = logging.getLogger(__name__)


def delta_rule(mean_cell_area: float) -> float:
    """One third of the diameter of the circle with the mean cell area."""
    return equivalent_diameter(mean_cell_area) / 3.0


def rmax_rule(window: Window) -> float:
    """A quarter of the shorter side of a rectangular window."""
    if not window.is_rectangle:
        raise UnsupportedRuleError(
            f"r_max rule is defined for rectangles only; supply r_max for {window.describe()}"
        )
    return min(window.lx, window.ly) / 4.0


def start_points(bounds: ParameterBounds, n_starts: int) -> np.ndarray:
    """Deterministic starts in (log phi, log sigma2): the box centre, then a Halton lattice."""
    lo = np.log([bounds.phi[0], bounds.sigma2[0]])
    hi = np.log([bounds.phi[1], bounds.sigma2[1]])
    unit = np.vstack([[0.5, 0.5], qmc.Halton(d=2, scramble=False).random(n_starts)[1:]])
    return lo + unit[:n_starts] * (hi - lo)


def _initial_simplex(x0: np.ndarray, lo: np.ndarray, hi: np.ndarray, step: float) -> np.ndarray:
    simplex = [x0]
    for axis in range(x0.size):
        vertex = x0.copy()
        vertex[axis] = x0[axis] + step if x0[axis] + step <= hi[axis] else x0[axis] - step
        vertex[axis] = min(max(vertex[axis], lo[axis]), hi[axis])
        simplex.append(vertex)
    return np.array(simplex)


def fit(
    khat: KEstimate,
    config: ContrastConfig,
    bounds: Optional[ParameterBounds] = None,
    optimizer: Optional[OptimizerSpec] = None,
    method_label: Optional[MethodLabel] = None,
) -> FitResult:
    """Minimise the contrast over the parameter box by multi-start Nelder-Mead in log space.

    Args:
        khat: Empirical (or theoretical) K on a grid covering [delta, r_max].
        config: Integration range and exponent; delta > 0 gives the modified contrast.
        bounds: Box for (phi, sigma2).
        optimizer: Start count and stopping rules.
        method_label: Label recorded on the result; defaults to MMC when delta > 0, else MC.

    Returns:
        The best converged local minimum over all starts.

    Raises:
        NonConvergenceError: If no start converges. ``diagnostics`` holds the best attempt.
    """
    bounds = bounds or ParameterBounds()
    optimizer = optimizer or OptimizerSpec()
    if method_label is None:
        method_label = MethodLabel.MMC if config.delta > 0 else MethodLabel.MC

    objective = ContrastObjective.build(khat, config)
    lo = np.log([bounds.phi[0], bounds.sigma2[0]])
    hi = np.log([bounds.phi[1], bounds.sigma2[1]])

    def log_objective(theta: np.ndarray) -> float:
        theta = np.clip(theta, lo, hi)
        return objective(math.exp(theta[0]), math.exp(theta[1]))

    results: List[OptimizeResult] = []
    for k, x0 in enumerate(start_points(bounds, optimizer.n_starts)):
        logger.debug(f"Start {k}: phi={math.exp(x0[0]):.4g}, sigma2={math.exp(x0[1]):.4g}")
        result = minimize(
            log_objective,
            x0,
            method="Nelder-Mead",
            bounds=list(zip(lo, hi)),
            options={
                "xatol": optimizer.xatol,
                "fatol": optimizer.fatol,
                "maxiter": optimizer.max_iter,
                "initial_simplex": _initial_simplex(x0, lo, hi, optimizer.initial_step),
            },
        )
        results.append(result)

    converged = [r for r in results if r.success]
    pool = converged or results
    best = min(pool, key=lambda r: float(r.fun))
    theta = np.clip(best.x, lo, hi)
    phi_hat, sigma2_hat = float(math.exp(theta[0])), float(math.exp(theta[1]))
    diagnostics = FitDiagnostics(
        iterations=int(best.nit),
        evaluations=int(sum(r.nfev for r in results)),
        restarts=len(results),
        converged_starts=len(converged),
        converged=bool(converged),
        message=str(best.message),
    )
    if not converged:
        logger.warning(
            f"No Nelder-Mead start converged for {method_label.value}; "
            f"best contrast {float(best.fun):.6g}"
        )
        raise NonConvergenceError(
            f"All {len(results)} optimizer starts failed to converge",
            diagnostics={
                "phi_hat": phi_hat,
                "sigma2_hat": sigma2_hat,
                "contrast_value": max(float(best.fun), 0.0),
                **diagnostics.model_dump(),
            },
        )

    return FitResult(
        phi_hat=phi_hat,
        sigma2_hat=sigma2_hat,
        contrast_value=max(float(best.fun), 0.0),
        method_label=method_label,
        delta=objective.delta,
        r_max=objective.r_max,
        bounds=bounds,
        diagnostics=diagnostics,
    )
