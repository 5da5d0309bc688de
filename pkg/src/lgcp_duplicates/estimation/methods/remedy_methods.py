"""Minimum contrast after one of the duplicate remedies."""

from lgcp_duplicates.geometry import PointPattern
from lgcp_duplicates.models import MethodLabel

from ..remedies import dedup, jitter, redistribute
from .base import EstimationMethod, MethodContext


class DeletionMethod(EstimationMethod):
    label = MethodLabel.MC_I
    preprocessing_key = "dedup"

    def preprocess(self, pattern: PointPattern, context: MethodContext) -> PointPattern:
        return dedup(pattern, context.tol)


class JitterMethod(EstimationMethod):
    label = MethodLabel.MC_II
    preprocessing_key = "jitter"
    stream = 2

    def preprocess(self, pattern: PointPattern, context: MethodContext) -> PointPattern:
        return jitter(pattern, context.jitter_d, self.rng(context), context.tol)


class RedistributionMethod(EstimationMethod):
    label = MethodLabel.MC_III
    preprocessing_key = "redistribute"
    stream = 3

    def preprocess(self, pattern: PointPattern, context: MethodContext) -> PointPattern:
        return redistribute(pattern, context.partition, self.rng(context), context.tol)
