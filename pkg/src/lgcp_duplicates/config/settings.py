"""Configuration management for the toolkit."""

from functools import lru_cache
from typing import Tuple

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Process-wide defaults loaded from environment variables (prefix ``LGCP_``)."""

    # Logging
    log_level: str = "INFO"

    # Reproducibility
    default_seed: int = Field(default=20240101, ge=0)

    # Default observation window [x0, x1] x [y0, y1]
    window: Tuple[float, float, float, float] = (0.0, 810.0, 0.0, 810.0)

    # Simulation grid for the Gaussian random field
    sim_grid: Tuple[int, int] = (256, 256)

    # Evaluation grid for kernel intensity estimates
    intensity_grid: Tuple[int, int] = (128, 128)

    # K-function distance grid (nodes on [0, r_max])
    r_points: int = Field(default=513, ge=3)

    # Study defaults
    replications: int = Field(default=100, ge=1)
    workers: int = Field(default=1, ge=1)

    # Duplicate grouping tolerance relative to max(L_x, L_y)
    duplicate_rel_tol: float = Field(default=1e-9, ge=0)

    # Outputs
    output_dir: str = "results"
    metrics_textfile: bool = True

    model_config = SettingsConfigDict(
        env_prefix="LGCP_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )


@lru_cache()
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()
