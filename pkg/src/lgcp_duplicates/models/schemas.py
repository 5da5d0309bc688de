"""Pydantic schemas for model parameters, estimator configuration and fit results."""

from enum import Enum
from typing import Annotated, Any, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator


class MethodLabel(str, Enum):
    """Estimation pipeline: plain MC, the three duplicate remedies, or MMC."""

    MC = "MC"
    MC_I = "MC-I"
    MC_II = "MC-II"
    MC_III = "MC-III"
    MMC = "MMC"


class CovarianceParams(BaseModel):
    """Exponential covariance c(h) = sigma2 * exp(-h / phi) of the latent field."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    phi: float = Field(..., gt=0, description="Spatial range (length units)")
    sigma2: float = Field(..., ge=0, description="Variance of the Gaussian field")


# --- Mean models ---


class ConstantMean(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["constant"] = "constant"
    value: float


class CoordinateLinearMean(BaseModel):
    """m(s) = intercept + coef_x * s1 + coef_y * s2."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["coordinate"] = "coordinate"
    intercept: float
    coef_x: float
    coef_y: float


class AnchorDistanceCovariate(BaseModel):
    """log(1 + distance to the nearest of ``n_anchors`` random anchor points)."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["log_anchor_distance"] = "log_anchor_distance"
    n_anchors: int = Field(default=10, ge=1)
    seed: int = 0


class SegmentDistanceCovariate(BaseModel):
    """log(1 + distance to the segment start-end)."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["log_segment_distance"] = "log_segment_distance"
    start: Tuple[float, float]
    end: Tuple[float, float]


class RasterFileCovariate(BaseModel):
    """Covariate read from a RasterField CSV sharing the simulation grid."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["raster_file"] = "raster_file"
    path: str


CovariateSpec = Annotated[
    Union[AnchorDistanceCovariate, SegmentDistanceCovariate, RasterFileCovariate],
    Field(discriminator="kind"),
]


class CovariateLinearMean(BaseModel):
    """m(s) = intercept + sum_k coefficients[k] * covariate_k(s).

    With ``expected_count`` set, the intercept is recalibrated on the simulation grid
    so that the integral of exp(m) equals ``expected_count``.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["covariate"] = "covariate"
    intercept: float
    coefficients: List[float]
    covariates: List[CovariateSpec]
    expected_count: Optional[float] = Field(default=None, gt=0)

    @model_validator(mode="after")
    def _check_lengths(self) -> "CovariateLinearMean":
        if len(self.coefficients) != len(self.covariates):
            raise ValueError(
                f"{len(self.coefficients)} coefficients for {len(self.covariates)} covariates"
            )
        return self


MeanModel = Annotated[
    Union[ConstantMean, CoordinateLinearMean, CovariateLinearMean],
    Field(discriminator="kind"),
]


# --- Intensity and contrast configuration ---


class ContrastConfig(BaseModel):
    """Integration range [delta, r_max] and exponent of the contrast criterion."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    delta: float = Field(default=0.0, ge=0)
    r_max: float = Field(..., gt=0)
    exponent: float = Field(default=0.25, gt=0)

    @model_validator(mode="after")
    def _check_range(self) -> "ContrastConfig":
        if not self.delta < self.r_max:
            raise ValueError(f"delta ({self.delta}) must be below r_max ({self.r_max})")
        return self


class ParameterBounds(BaseModel):
    """Box bounds for (phi, sigma2)."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    phi: Tuple[float, float] = (0.1, 50.0)
    sigma2: Tuple[float, float] = (0.01, 20.0)

    @model_validator(mode="after")
    def _check_box(self) -> "ParameterBounds":
        for name, (lo, hi) in (("phi", self.phi), ("sigma2", self.sigma2)):
            if not 0 < lo < hi:
                raise ValueError(f"{name} bounds must satisfy 0 < lo < hi, got ({lo}, {hi})")
        return self


class OptimizerSpec(BaseModel):
    """Nelder-Mead in log-parameter space with lattice multi-starts."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    n_starts: int = Field(default=5, ge=1)
    max_iter: int = Field(default=500, ge=1)
    xatol: float = Field(default=1e-6, gt=0)
    fatol: float = Field(default=1e-10, gt=0)
    initial_step: float = Field(default=0.5, gt=0)


# --- Results ---


class FitDiagnostics(BaseModel):
    iterations: int = 0
    evaluations: int = 0
    restarts: int = 0
    converged_starts: int = 0
    converged: bool = False
    message: str = ""


class FitResult(BaseModel):
    """Estimated (phi, sigma2) with the configuration that produced them."""

    phi_hat: float
    sigma2_hat: float
    contrast_value: float = Field(..., ge=0)
    method_label: MethodLabel
    delta: float
    r_max: float
    bounds: ParameterBounds
    diagnostics: FitDiagnostics
    metadata: Optional[Dict[str, Any]] = None

    @property
    def converged(self) -> bool:
        return self.diagnostics.converged
