"""Minimum-contrast estimation and duplicate remedies."""

from .contrast import ContrastObjective, contrast
from .fit import delta_rule, fit, rmax_rule, start_points
from .methods import EstimationMethod, MethodContext, MethodFactory
from .remedies import dedup, jitter, redistribute

__all__ = [
    "ContrastObjective",
    "EstimationMethod",
    "MethodContext",
    "MethodFactory",
    "contrast",
    "dedup",
    "delta_rule",
    "fit",
    "jitter",
    "redistribute",
    "rmax_rule",
    "start_points",
]
