"""Method factory for the estimation pipelines."""

import logging
from typing import Dict, Iterable, List, Type, Union

from lgcp_duplicates.errors import ConfigError
from lgcp_duplicates.models import MethodLabel

from .base import EstimationMethod
from .contrast_methods import MinimumContrast, ModifiedMinimumContrast
from .remedy_methods import DeletionMethod, JitterMethod, RedistributionMethod

logger = logging.getLogger(__name__)


class MethodFactory:
    """Factory for creating and retrieving estimation methods."""

    _instances: Dict[MethodLabel, EstimationMethod] = {}
    _registry: Dict[MethodLabel, Type[EstimationMethod]] = {
        MethodLabel.MC: MinimumContrast,
        MethodLabel.MC_I: DeletionMethod,
        MethodLabel.MC_II: JitterMethod,
        MethodLabel.MC_III: RedistributionMethod,
        MethodLabel.MMC: ModifiedMinimumContrast,
    }

    @classmethod
    def register_method(cls, label: MethodLabel, method_cls: Type[EstimationMethod]) -> None:
        """Register a method class, replacing any cached instance."""
        cls._registry[label] = method_cls
        cls._instances.pop(label, None)

    @classmethod
    def get_method(cls, label: Union[str, MethodLabel]) -> EstimationMethod:
        """Get or create the method for a label such as 'MC-II'.

        Raises:
            ConfigError: If the label is unknown.
        """
        try:
            key = MethodLabel(label)
        except ValueError:
            raise ConfigError(f"Unknown estimation method: {label}")
        if key in cls._instances:
            return cls._instances[key]
        if key not in cls._registry:
            raise ConfigError(f"No implementation registered for {key.value}")
        instance = cls._registry[key]()
        cls._instances[key] = instance
        logger.debug(f"Initialized estimation method: {key.value}")
        return instance

    @classmethod
    def get_methods(cls, labels: Iterable[Union[str, MethodLabel]]) -> List[EstimationMethod]:
        return [cls.get_method(label) for label in labels]
