"""The (modified) minimum-contrast criterion."""

import logging
from dataclasses import dataclass

import numpy as np
from scipy.integrate import trapezoid

from lgcp_duplicates.errors import ConfigError
from lgcp_duplicates.kfunction import KEstimate
from lgcp_duplicates.models import ContrastConfig, CovarianceParams
from lgcp_duplicates.simulate import theoretical_k_curve

logger = logging.getLogger(__name__)


def _nearest_node(r: np.ndarray, value: float) -> int:
    return int(np.argmin(np.abs(r - value)))


@dataclass(frozen=True, eq=False)
class ContrastObjective:
    """U_delta(phi, sigma2) = int_delta^r_max (K_hat^c - K^c)^2 dr for one fixed K estimate.

    delta and r_max are snapped to the nearest nodes of the K grid; the integral is the
    composite trapezoid rule over the nodes between them.
    """

    r: np.ndarray
    target: np.ndarray
    exponent: float
    delta: float
    r_max: float

    @classmethod
    def build(cls, khat: KEstimate, config: ContrastConfig) -> "ContrastObjective":
        r = khat.r
        spacing = float(np.min(np.diff(r)))
        if config.r_max > r[-1] + 0.5 * spacing:
            raise ConfigError(
                f"r_max={config.r_max:g} exceeds the K grid, which ends at {r[-1]:g}"
            )
        lo = _nearest_node(r, config.delta)
        hi = _nearest_node(r, config.r_max)
        sub_r = r[lo : hi + 1]
        target = np.power(np.clip(khat.khat[lo : hi + 1], 0.0, None), config.exponent)
        return cls(
            r=sub_r,
            target=target,
            exponent=config.exponent,
            delta=float(r[lo]),
            r_max=float(r[hi]),
        )

    @property
    def vanishing(self) -> bool:
        return self.r.size < 2

    def __call__(self, phi: float, sigma2: float) -> float:
        if self.vanishing:
            return 0.0
        model = theoretical_k_curve(self.r, CovarianceParams(phi=phi, sigma2=sigma2))
        residual = self.target - np.power(model, self.exponent)
        return float(trapezoid(residual * residual, self.r))


def contrast(khat: KEstimate, phi: float, sigma2: float, config: ContrastConfig) -> float:
    """Contrast between an empirical K and the LGCP K(.; phi, sigma2) on [delta, r_max]."""
    return ContrastObjective.build(khat, config)(phi, sigma2)
