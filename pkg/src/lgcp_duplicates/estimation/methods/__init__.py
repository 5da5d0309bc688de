"""Estimation methods: minimum contrast variants and duplicate remedies."""

from .base import EstimationMethod, MethodContext
from .factory import MethodFactory

__all__ = ["EstimationMethod", "MethodContext", "MethodFactory"]
