"""Application configuration."""
from functools import lru_cache
from typing import List

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_prefix="JOINTFLEX_", env_file=".env", case_sensitive=True, extra="ignore"
    )

    # Logging
    LOG_LEVEL: str = Field(default="INFO")
    LOG_FORMAT: str = Field(default="json")  # "json" or "text"

    # LP backend (see jointflex.adapters)
    LP_SOLVER: str = Field(default="highs")
    LP_FEASIBILITY_TOLERANCE: float = Field(default=1e-7)

    # Pair selection
    DEFAULT_EPSILON: float = Field(default=0.1, gt=0)
    PENETRATION_TOLERANCE: float = Field(default=1e-9, ge=0)
    FLAT_CORNER_TOLERANCE: float = Field(default=1e-9, ge=0)
    CORNER_MODE: str = Field(default="averaged")  # "averaged" or "plain"

    # Trust region
    TRANSLATION_BOUND_FACTOR: float = Field(default=10.0, gt=0)  # times epsilon
    ROTATION_BOUND: float = Field(default=0.5, gt=0)  # radians

    # Separation
    SEPARATION_K: float = Field(default=1e6, gt=0)

    # Time stepping
    STEP_ETA: float = Field(default=1e-3, gt=0)
    STEP_SCALES: List[float] = Field(
        default=[1 / 16, 1 / 8, 1 / 4, 1 / 2, 1.0, 2.0, 4.0]
    )
    MAX_ITERS: int = Field(default=50, ge=1)
    CONVERGENCE_FACTOR: float = Field(default=1e-6, gt=0)  # times diameter
    BOUND_SHRINK_ATTEMPTS: int = Field(default=4, ge=0)

    # Flock
    FLOCK_NEIGHBORS: int = Field(default=5, ge=1)
    FLOCK_THETA_CAP: float = Field(default=0.02, gt=0)  # radians per step


@lru_cache()
def get_settings() -> Settings:
    return Settings()


settings = get_settings()
