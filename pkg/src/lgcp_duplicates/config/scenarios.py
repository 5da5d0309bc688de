"""
Scenario presets and scenario files.

Presets and documents without a preset take their grid, replication count, distance
grid and base seed from the process settings; every key a document sets wins.
"""

import logging
import math

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Any, Dict, Union

from pydantic import ValidationError

from lgcp_duplicates.errors import ConfigError, DataIOError
from lgcp_duplicates.models import (
    AnchorDistanceCovariate,
    BandwidthConfig,
    ConstantMean,
    CoordinateLinearMean,
    CorruptionConfig,
    CovariateLinearMean,
    CovarianceParams,
    ScenarioConfig,
    SegmentDistanceCovariate,
)

from .settings import get_settings

logger = logging.getLogger(__name__)

PHI_BY_INDEX = {1: 15.0, 2: 20.0, 3: 30.0}
SIGMA2 = 2.0
EXPECTED_COUNT = 1000.0
SIDE = 810.0

# RED-selected fixed bandwidths for the coordinate-linear scenarios, keyed by phi
IH1_BANDWIDTHS = {15.0: 270.0, 20.0: 285.0, 30.0: 325.0}

# cells of the irregular partition standing in for administrative districts
IH2_DISTRICTS = 328


def _settings_defaults() -> Dict[str, Any]:
    settings = get_settings()
    return {
        "sim_grid": settings.sim_grid,
        "replications": settings.replications,
        "r_points": settings.r_points,
        "base_seed": settings.default_seed,
    }


def get_scenario_presets() -> Dict[str, ScenarioConfig]:
    """
    Get the nine standard scenarios keyed by label.
    H: constant mean; IH1: coordinate-linear mean; IH2: covariate-linear mean.
    """
    presets: Dict[str, ScenarioConfig] = {}
    defaults = _settings_defaults()

    for k, phi in PHI_BY_INDEX.items():
        cov = CovarianceParams(phi=phi, sigma2=SIGMA2)

        # --- Homogeneous ---
        presets[f"H.{k}"] = ScenarioConfig(
            label=f"H.{k}",
            mean=ConstantMean(value=math.log(EXPECTED_COUNT / SIDE**2)),
            covariance=cov,
            intensity=BandwidthConfig(kind="constant"),
            **defaults,
        )

        # --- Coordinate-linear ---
        presets[f"IH1.{k}"] = ScenarioConfig(
            label=f"IH1.{k}",
            mean=CoordinateLinearMean(intercept=-7.0753, coef_x=-0.0018, coef_y=0.0026),
            covariance=cov,
            intensity=BandwidthConfig(kind="fixed", h=IH1_BANDWIDTHS[phi]),
            **defaults,
        )

        # --- Covariate-linear, synthetic covariates ---
        presets[f"IH2.{k}"] = ScenarioConfig(
            label=f"IH2.{k}",
            mean=CovariateLinearMean(
                intercept=-1.16,
                coefficients=[-0.392, -1.075],
                covariates=[
                    AnchorDistanceCovariate(n_anchors=10, seed=7),
                    SegmentDistanceCovariate(start=(100.0, 150.0), end=(700.0, 650.0)),
                ],
                expected_count=EXPECTED_COUNT,
            ),
            covariance=cov,
            corruption=CorruptionConfig(
                partition="tessellation", n_cells=IH2_DISTRICTS, partition_seed=328
            ),
            intensity=BandwidthConfig(kind="adaptive", select="cvl"),
            **defaults,
        )

    return presets


def _deep_merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    merged = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def scenario_from_document(document: Dict[str, Any]) -> ScenarioConfig:
    """Build a scenario from a parsed document; ``preset`` names the base to override."""
    document = dict(document)
    preset = document.pop("preset", None)
    if preset is not None:
        presets = get_scenario_presets()
        if preset not in presets:
            raise ConfigError(f"Unknown preset {preset!r}; choose from {sorted(presets)}")
        base = presets[preset].model_dump(mode="json")
        # a new mean kind replaces the preset mean instead of merging into it
        base_kind = base["mean"]["kind"]
        if document.get("mean", {}).get("kind", base_kind) != base_kind:
            base.pop("mean")
        document = _deep_merge(base, document)
    else:
        document = {**_settings_defaults(), **document}
    try:
        return ScenarioConfig.model_validate(document)
    except ValidationError as e:
        raise ConfigError(f"Invalid scenario configuration: {e}")


def load_scenario(path: Union[str, Path]) -> ScenarioConfig:
    """Load a scenario from a TOML file."""
    try:
        with Path(path).open("rb") as fh:
            document = tomllib.load(fh)
    except OSError as e:
        raise DataIOError(f"Cannot read scenario file {path}: {e}")
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"Scenario file {path} is not valid TOML: {e}")
    scenario = scenario_from_document(document)
    logger.info(f"Loaded scenario {scenario.label} from {path}")
    return scenario
