"""Configuration package."""

from .scenarios import get_scenario_presets, load_scenario, scenario_from_document
from .settings import Settings, get_settings

__all__ = [
    "Settings",
    "get_scenario_presets",
    "get_settings",
    "load_scenario",
    "scenario_from_document",
]
