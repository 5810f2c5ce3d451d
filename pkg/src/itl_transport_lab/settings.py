"""
Process-wide runtime settings.

Values come from ``ITL_LAB_*`` environment variables; CLI flags override them.
Experiment parameters live in ``ExperimentConfig`` instead.
"""
from functools import lru_cache

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

from itl_transport_lab.core.models import constants


class LabSettings(BaseSettings):
    """
    Runtime knobs that do not change results, only how they are computed.

    Attributes:
        threads: worker threads for ensemble integration
        log_level: logging level name for the CLI
        output_dir: default artifact directory
        blowup_threshold: coefficient modulus that aborts an integration
        midpoint_tolerance: fixed-point tolerance of the implicit midpoint step
        midpoint_max_iter: iteration cap of the implicit midpoint step
    """
    model_config = SettingsConfigDict(env_prefix="ITL_LAB_", extra="ignore")

    threads: int = Field(default=1, ge=1)
    log_level: str = Field(default="INFO")
    output_dir: str = Field(default="./runs")
    blowup_threshold: float = Field(default=constants.BLOWUP_THRESHOLD, gt=0.0)
    midpoint_tolerance: float = Field(default=constants.MIDPOINT_TOLERANCE, gt=0.0)
    midpoint_max_iter: int = Field(default=constants.MIDPOINT_MAX_ITER, ge=1)


@lru_cache(maxsize=1)
def get_settings() -> LabSettings:
    """Return the cached settings instance."""
    return LabSettings()
