"""Plain and modified minimum contrast on the observed pattern."""

from lgcp_duplicates.geometry import PointPattern
from lgcp_duplicates.models import ContrastConfig, MethodLabel

from .base import EstimationMethod, MethodContext


class MinimumContrast(EstimationMethod):
    """MC: contrast integrated from 0, duplicates left in place."""

    label = MethodLabel.MC

    def preprocess(self, pattern: PointPattern, context: MethodContext) -> PointPattern:
        return pattern


class ModifiedMinimumContrast(MinimumContrast):
    """MMC: contrast integrated from delta, which skips the zero-distance artifact."""

    label = MethodLabel.MMC

    def contrast_config(self, context: MethodContext) -> ContrastConfig:
        return ContrastConfig(delta=context.delta, r_max=context.r_max)
