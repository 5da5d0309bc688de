"""Log-Gaussian Cox process simulation and the theoretical LGCP K-function."""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.special import gammainc, gammaln

from lgcp_duplicates.errors import DomainError, SimulationOverflowError
from lgcp_duplicates.geometry import PointPattern, Window
from lgcp_duplicates.models import CovarianceParams, MeanModel

from .covariates import resolve_mean
from .grf import SeedLike, as_generator, simulate_grf
from .raster import RasterField

logger = logging.getLogger(__name__)

# exp() overflows float64 above ~709.78
MAX_LOG_INTENSITY = 700.0
SERIES_MAX_TERMS = 2000


@dataclass(frozen=True, eq=False)
class LGCPRealization:
    """A simulated pattern together with the latent field and the intensity that generated it."""

    pattern: PointPattern
    intensity: RasterField
    field: RasterField
    mean: RasterField


def sample_poisson_raster(intensity: RasterField, seed: SeedLike) -> PointPattern:
    """Inhomogeneous Poisson pattern for a piecewise-constant intensity raster.

    Each cell receives a Poisson count with mean value * cell area; its points are
    uniform in the cell. Points are ordered by cell (x fastest), then by draw.
    For polygon windows, points falling outside the window are discarded.
    """
    rng = as_generator(seed)
    values = np.asarray(intensity.values)
    if np.any(values < 0):
        raise SimulationOverflowError("Intensity raster has negative values")
    counts = rng.poisson(values.ravel() * intensity.cell_area)
    total = int(counts.sum())
    cell = np.repeat(np.arange(counts.size), counts)
    ix = cell % intensity.nx
    iy = cell // intensity.nx
    x0, _, y0, _ = intensity.window.bounds
    u = rng.uniform(0.0, 1.0, size=(total, 2))
    points = np.column_stack(
        [x0 + (ix + u[:, 0]) * intensity.dx, y0 + (iy + u[:, 1]) * intensity.dy]
    )
    if not intensity.window.is_rectangle:
        points = points[intensity.window.contains(points, tol=0.0)]
    return PointPattern(points=points, window=intensity.window)


def realize_lgcp(
    mean: MeanModel,
    cov: CovarianceParams,
    window: Window,
    nx: int,
    ny: int,
    seed: SeedLike,
) -> LGCPRealization:
    """Draw Lambda = exp(m + Z) on the grid and a Poisson pattern conditional on it.

    Raises:
        SimulationOverflowError: If the log intensity exceeds the float range of exp.
    """
    if isinstance(seed, np.random.Generator):
        field_rng, points_rng = seed, seed
    else:
        field_seq, points_seq = np.random.SeedSequence(seed).spawn(2)
        field_rng, points_rng = np.random.default_rng(field_seq), np.random.default_rng(points_seq)

    mean_raster = resolve_mean(mean, window, nx, ny)
    field = simulate_grf(window, nx, ny, cov, field_rng)
    log_intensity = mean_raster.values + field.values
    peak = float(log_intensity.max())
    if peak > MAX_LOG_INTENSITY:
        raise SimulationOverflowError(
            f"Log intensity reaches {peak:.6g}, above the limit {MAX_LOG_INTENSITY:g}"
        )
    intensity = field.with_values(np.exp(log_intensity))
    pattern = sample_poisson_raster(intensity, points_rng)
    logger.debug(
        f"Simulated LGCP with phi={cov.phi:g}, sigma2={cov.sigma2:g}: "
        f"{pattern.n} points (expected {intensity.integral():.1f})"
    )
    return LGCPRealization(pattern=pattern, intensity=intensity, field=field, mean=mean_raster)


def simulate_lgcp(
    mean: MeanModel,
    cov: CovarianceParams,
    window: Window,
    nx: int,
    ny: int,
    seed: SeedLike,
) -> PointPattern:
    return realize_lgcp(mean, cov, window, nx, ny, seed).pattern


# --- Theoretical K-function ---


def theoretical_k(r: float, cov: CovarianceParams) -> float:
    """K(r) = 2*pi * int_0^r s * exp(sigma2 * exp(-s / phi)) ds by adaptive quadrature."""
    if r < 0:
        raise DomainError(f"Distance must be >= 0, got {r}")
    if r == 0:
        return 0.0
    if cov.sigma2 == 0.0:
        return math.pi * r * r

    def integrand(s: float) -> float:
        return s * math.exp(cov.sigma2 * math.exp(-s / cov.phi))

    value, _ = integrate.quad(integrand, 0.0, r, epsabs=0.0, epsrel=1e-11, limit=500)
    return 2.0 * math.pi * value


def _series_terms(sigma2: float) -> int:
    # sigma2^k / k! decays geometrically once k exceeds e^2 * sigma2
    return int(min(SERIES_MAX_TERMS, math.ceil(math.e**2 * sigma2 + 30)))


def theoretical_k_curve(r: np.ndarray, cov: CovarianceParams) -> np.ndarray:
    """Vectorised K(r) on a distance grid.

    Expanding exp(sigma2 * exp(-s/phi)) as a power series gives
    K(r) = pi r^2 + 2 pi phi^2 sum_{k>=1} sigma2^k / (k! k^2) * P(2, k r / phi),
    with P the regularized lower incomplete gamma function.
    """
    r = np.asarray(r, dtype=float)
    base = math.pi * r**2
    if cov.sigma2 == 0.0:
        return base
    k = np.arange(1, _series_terms(cov.sigma2) + 1, dtype=float)
    log_coef = k * math.log(cov.sigma2) - gammaln(k + 1.0) - 2.0 * np.log(k)
    scaled = np.multiply.outer(r, k) / cov.phi
    series = gammainc(2.0, scaled) @ np.exp(log_coef)
    return base + 2.0 * math.pi * cov.phi**2 * series
