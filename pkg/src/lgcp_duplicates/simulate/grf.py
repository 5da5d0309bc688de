"""Stationary Gaussian random fields with exponential covariance, sampled on a raster.

The sampler uses circulant embedding: the covariance of the grid is embedded in a
block-circulant matrix on a torus at least twice the grid size, whose eigenvalues are
the 2-D DFT of its first row. If that matrix is not nonnegative definite the torus is
enlarged; as a last resort the grid covariance is factorised densely.
"""

import logging
from typing import Optional, Union

import numpy as np
from scipy import linalg
from scipy.spatial.distance import cdist

from lgcp_duplicates.errors import ConfigError, EmbeddingError
from lgcp_duplicates.geometry import Window
from lgcp_duplicates.models import CovarianceParams

from .raster import RasterField

logger = logging.getLogger(__name__)

EXPANSION_FACTORS = (1, 2, 4)
DENSE_FALLBACK_MAX_CELLS = 128 * 128
# relative size of negative eigenvalues attributed to rounding
EIGEN_REL_TOL = 1e-10

SeedLike = Union[int, np.random.SeedSequence, np.random.Generator]


def as_generator(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def exponential_covariance(h: np.ndarray, cov: CovarianceParams) -> np.ndarray:
    """c(h) = sigma2 * exp(-h / phi)."""
    return cov.sigma2 * np.exp(-np.asarray(h, dtype=float) / cov.phi)


def _torus_eigenvalues(
    nx: int, ny: int, dx: float, dy: float, cov: CovarianceParams, factor: int
) -> np.ndarray:
    mx, my = 2 * nx * factor, 2 * ny * factor
    ix = np.arange(mx)
    iy = np.arange(my)
    hx = dx * np.minimum(ix, mx - ix)
    hy = dy * np.minimum(iy, my - iy)
    first_row = exponential_covariance(np.hypot(hx[None, :], hy[:, None]), cov)
    return np.real(np.fft.fft2(first_row))


def _sample_circulant(lam: np.ndarray, nx: int, ny: int, rng: np.random.Generator) -> np.ndarray:
    size = lam.size
    noise = rng.standard_normal(lam.shape) + 1j * rng.standard_normal(lam.shape)
    field = np.fft.fft2(np.sqrt(np.clip(lam, 0.0, None) / size) * noise)
    return np.real(field[:ny, :nx])


def _sample_dense(
    nx: int, ny: int, dx: float, dy: float, cov: CovarianceParams, rng: np.random.Generator
) -> np.ndarray:
    xs = (np.arange(nx) + 0.5) * dx
    ys = (np.arange(ny) + 0.5) * dy
    X, Y = np.meshgrid(xs, ys)
    coords = np.column_stack([X.ravel(), Y.ravel()])
    sigma = exponential_covariance(cdist(coords, coords), cov)
    eigval, eigvec = linalg.eigh(sigma)
    root = eigvec * np.sqrt(np.clip(eigval, 0.0, None))
    return (root @ rng.standard_normal(coords.shape[0])).reshape(ny, nx)


def simulate_grf(
    window: Window,
    nx: int,
    ny: int,
    cov: CovarianceParams,
    seed: SeedLike,
    mean: Optional[float] = None,
) -> RasterField:
    """One realization of a stationary Gaussian field at the cell centres of an nx by ny grid.

    The field has covariance ``sigma2 * exp(-h / phi)`` and constant mean ``-sigma2 / 2``
    unless ``mean`` is given, so that ``E[exp(Z)] = 1``.

    Raises:
        UnsupportedGeometryError: If the window is not a rectangle.
        EmbeddingError: If no embedding is nonnegative definite and the grid is too
            large for dense factorisation.
    """
    window.require_rectangle("simulate_grf")
    if nx < 2 or ny < 2:
        raise ConfigError(f"GRF grid must be at least 2x2, got {nx}x{ny}")
    rng = as_generator(seed)
    offset = -0.5 * cov.sigma2 if mean is None else float(mean)
    dx, dy = window.lx / nx, window.ly / ny

    if cov.sigma2 == 0.0:
        return RasterField(window=window, values=np.full((ny, nx), offset))

    for factor in EXPANSION_FACTORS:
        lam = _torus_eigenvalues(nx, ny, dx, dy, cov, factor)
        if lam.min() >= -EIGEN_REL_TOL * lam.max():
            if factor > 1:
                logger.info(f"Circulant embedding succeeded with expansion factor {factor}")
            values = _sample_circulant(lam, nx, ny, rng)
            return RasterField(window=window, values=values + offset)
        logger.info(
            f"Embedding factor {factor} not nonnegative definite "
            f"(min eigenvalue {lam.min():.3e}); expanding"
        )

    if nx * ny > DENSE_FALLBACK_MAX_CELLS:
        raise EmbeddingError(
            f"Circulant embedding failed up to factor {EXPANSION_FACTORS[-1]} and grid "
            f"{nx}x{ny} exceeds the dense fallback limit of {DENSE_FALLBACK_MAX_CELLS} cells"
        )
    logger.warning(f"Falling back to dense covariance factorisation on {nx}x{ny} grid")
    return RasterField(window=window, values=_sample_dense(nx, ny, dx, dy, cov, rng) + offset)
