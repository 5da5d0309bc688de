"""Abstract base class for estimation methods."""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np

from lgcp_duplicates.geometry import Partition, PointPattern
from lgcp_duplicates.kfunction import KEstimate
from lgcp_duplicates.models import (
    ContrastConfig,
    FitResult,
    MethodLabel,
    OptimizerSpec,
    ParameterBounds,
)

from ..fit import fit


@dataclass(frozen=True)
class MethodContext:
    """Per-(replication, fraction) inputs shared by every method."""

    partition: Partition
    r_max: float
    seed: int
    delta: float = 17.0
    jitter_d: float = 25.0
    tol: Optional[float] = None
    bounds: ParameterBounds = field(default_factory=ParameterBounds)
    optimizer: OptimizerSpec = field(default_factory=OptimizerSpec)


class EstimationMethod(ABC):
    """Abstract base class for estimation methods.

    A method is a preprocessing transform of the observed pattern followed by a
    contrast fit. Methods sharing a ``preprocessing_key`` produce the same transformed
    pattern, so the caller may compute K once for all of them.
    """

    label: MethodLabel
    preprocessing_key: str = "raw"
    # stream index for methods that draw random numbers
    stream: int = 0

    @abstractmethod
    def preprocess(self, pattern: PointPattern, context: MethodContext) -> PointPattern:
        """Return the pattern the K-function is computed from.

        Args:
            pattern: Observed (possibly corrupted) pattern
            context: Partition, seeds and remedy parameters

        Returns:
            Transformed pattern
        """
        pass

    def rng(self, context: MethodContext) -> np.random.Generator:
        return np.random.default_rng(np.random.SeedSequence([context.seed, self.stream]))

    def contrast_config(self, context: MethodContext) -> ContrastConfig:
        return ContrastConfig(delta=0.0, r_max=context.r_max)

    def estimate(self, khat: KEstimate, context: MethodContext) -> FitResult:
        """Fit (phi, sigma2) to the K estimate of the preprocessed pattern."""
        return fit(
            khat,
            self.contrast_config(context),
            bounds=context.bounds,
            optimizer=context.optimizer,
            method_label=self.label,
        )

    def get_method_info(self) -> Dict[str, str]:
        return {"label": self.label.value, "preprocessing": self.preprocessing_key}
