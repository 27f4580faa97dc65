from pydantic_settings import BaseSettings, SettingsConfigDict
from functools import lru_cache
from typing import Literal


class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_file=".env", env_file_encoding="utf-8", env_prefix="SYZ_")

    # Logging
    log_level: str = "INFO"

    # Loop-space truncation
    default_cutoff: int = 4

    # Critical point solver
    residual_tolerance: float = 1e-10
    dedup_radius: float = 1e-6  # relative distance
    newton_max_iterations: int = 100
    newton_step_tolerance: float = 1e-14

    # Groebner engine
    standard_monomial_limit: int = 10000

    # Reports
    report_digits: int = 12
    output_format: Literal["json", "text"] = "text"

    # Presets (None means the data directory shipped with the package)
    presets_dir: str | None = None


@lru_cache
def get_settings() -> Settings:
    return Settings()
