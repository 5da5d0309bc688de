"""Pydantic schemas for simulation-study scenarios and their summaries."""

from typing import Any, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .schemas import CovarianceParams, MeanModel, MethodLabel, OptimizerSpec, ParameterBounds

ALL_METHODS: Tuple[MethodLabel, ...] = (
    MethodLabel.MC,
    MethodLabel.MC_I,
    MethodLabel.MC_II,
    MethodLabel.MC_III,
    MethodLabel.MMC,
)


class BandwidthConfig(BaseModel):
    """First-order intensity used inside the inhomogeneous K.

    ``constant`` gives the homogeneous estimator; ``fixed`` and ``adaptive`` are kernel
    estimates whose bandwidth is either given or chosen by CvL per replication.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: Literal["constant", "fixed", "adaptive"] = "constant"
    h: Optional[float] = Field(default=None, gt=0)
    h0: Optional[float] = Field(default=None, gt=0)
    pilot_h: Optional[float] = Field(default=None, gt=0)
    select: Literal["none", "cvl"] = "none"
    candidates: Optional[List[float]] = None
    grid: Tuple[int, int] = (128, 128)

    @model_validator(mode="after")
    def _check_bandwidth(self) -> "BandwidthConfig":
        if self.select == "none":
            if self.kind == "fixed" and self.h is None:
                raise ValueError("fixed intensity requires h or select = 'cvl'")
            if self.kind == "adaptive" and self.h0 is None:
                raise ValueError("adaptive intensity requires h0 or select = 'cvl'")
        if self.candidates is not None and any(c <= 0 for c in self.candidates):
            raise ValueError("bandwidth candidates must be positive")
        return self


class CorruptionConfig(BaseModel):
    """Partition used for snapping and the corruption levels to study."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    partition: Literal["grid", "tessellation", "file"] = "grid"
    grid: Tuple[int, int] = (18, 18)
    n_cells: Optional[int] = Field(default=None, ge=1)
    partition_seed: int = 0
    path: Optional[str] = None
    fractions: List[float] = Field(default_factory=lambda: [0.0, 0.2, 0.4, 0.6], min_length=1)

    @field_validator("fractions")
    @classmethod
    def _check_fractions(cls, v: List[float]) -> List[float]:
        for f in v:
            if not 0.0 <= f <= 1.0:
                raise ValueError(f"corruption fraction {f} outside [0, 1]")
        return v

    @model_validator(mode="after")
    def _check_source(self) -> "CorruptionConfig":
        if self.partition == "file" and not self.path:
            raise ValueError("partition = 'file' requires path")
        return self


class ScenarioConfig(BaseModel):
    """One simulation study: model, corruption protocol, methods and seeds."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    label: str = "custom"
    window: Tuple[float, float, float, float] = (0.0, 810.0, 0.0, 810.0)
    mean: MeanModel
    covariance: CovarianceParams
    sim_grid: Tuple[int, int] = (256, 256)
    replications: int = Field(default=100, ge=1)
    corruption: CorruptionConfig = Field(default_factory=CorruptionConfig)
    intensity: BandwidthConfig = Field(default_factory=BandwidthConfig)
    methods: List[MethodLabel] = Field(default_factory=lambda: list(ALL_METHODS))
    delta: Optional[float] = Field(default=17.0, ge=0)
    jitter_d: float = Field(default=25.0, gt=0)
    r_max: Optional[float] = Field(default=None, gt=0)
    r_points: int = Field(default=513, ge=3)
    duplicate_tol: Optional[float] = Field(default=None, ge=0)
    bounds: ParameterBounds = Field(default_factory=ParameterBounds)
    optimizer: OptimizerSpec = Field(default_factory=OptimizerSpec)
    base_seed: int = Field(default=20240101, ge=0)

    @field_validator("delta", mode="before")
    @classmethod
    def _delta_rule_keyword(cls, v: Any) -> Any:
        # TOML has no null; "rule" asks for the rule of thirds
        return None if v == "rule" else v

    @field_validator("methods")
    @classmethod
    def _unique_methods(cls, v: List[MethodLabel]) -> List[MethodLabel]:
        if len(set(v)) != len(v):
            raise ValueError("methods must not repeat")
        return v


class QuantileBand(BaseModel):
    q05: float
    q25: float
    q50: float
    q75: float
    q95: float


class SummaryRow(BaseModel):
    """Per (method, fraction) distribution of the estimates over converged replications."""

    method: MethodLabel
    fraction: float
    n_rows: int
    n_converged: int
    convergence_rate: float
    phi: Optional[QuantileBand] = None
    sigma2: Optional[QuantileBand] = None
    red_of_medians: Optional[float] = None


class StudySummary(BaseModel):
    label: str
    phi_true: float
    sigma2_true: float
    rows: List[SummaryRow]
